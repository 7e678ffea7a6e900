#pragma once

// Simple Lie algebras from Cartan data.
//
// Weights are carried in Dynkin (fundamental-weight) coordinates and roots in
// simple-root coordinates. The invariant form is normalized so the highest
// root has square length 2. Casimir-type sums use the dual-basis pairing
// sum_a x_a (x) x^a, which stays rational for any basis.

#include <algorithm>
#include <cctype>
#include <map>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "wznw/exact.hpp"

namespace wznw {

using Weight = std::vector<long>;  // Dynkin labels
using RootVec = std::vector<long>; // simple-root coordinates

struct CartanData {
  std::string type_label;
  std::size_t rank = 0;
  std::vector<std::vector<long>> cartan_matrix;  // A_ij = <alpha_i^vee, alpha_j>
  std::vector<Rational> half_lengths;            // d_i = (alpha_i, alpha_i)/2
  QMatrix simple_roots;                          // row i = alpha_i in Dynkin coordinates
  QMatrix fundamental_weights;                   // row i = omega_i in simple-root coordinates
  QMatrix bilinear_form;                         // (omega_i, omega_j)
  std::vector<RootVec> positive_roots;           // sorted by height, then lexicographically
  RootVec theta;
  Weight rho;  // all ones
  long dual_coxeter = 0;

  /// (mu, nu) for weights in Dynkin coordinates.
  Rational form(const std::vector<Rational>& mu, const std::vector<Rational>& nu) const {
    Rational s = 0;
    for (std::size_t i = 0; i < rank; ++i)
      for (std::size_t j = 0; j < rank; ++j) s += mu[i] * bilinear_form(i, j) * nu[j];
    return s;
  }
  Rational form(const Weight& mu, const Weight& nu) const { return form(to_q(mu), to_q(nu)); }

  /// Dynkin coordinates of a root given in simple-root coordinates.
  std::vector<Rational> root_to_weight(const RootVec& root) const {
    std::vector<Rational> w(rank, Rational(0));
    for (std::size_t j = 0; j < rank; ++j)
      for (std::size_t i = 0; i < rank; ++i) w[i] += root[j] * cartan_matrix[i][j];
    return w;
  }

  /// <mu, alpha^vee> for a root alpha in simple-root coordinates.
  Rational pair_with_coroot(const std::vector<Rational>& mu, const RootVec& alpha) const {
    const auto a = root_to_weight(alpha);
    return 2 * form(mu, a) / form(a, a);
  }

  static std::vector<Rational> to_q(const Weight& w) { return std::vector<Rational>(w.begin(), w.end()); }
};

namespace detail {

inline std::vector<std::vector<long>> cartan_matrix_for(char type, std::size_t n) {
  std::vector<std::vector<long>> a(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) a[i][i] = 2;
  auto link = [&](std::size_t i, std::size_t j) { a[i][j] = a[j][i] = -1; };
  switch (type) {
    case 'A':
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
      break;
    case 'B':
      if (n < 2) throw std::invalid_argument("type B requires rank >= 2");
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
      a[n - 1][n - 2] = -2;  // alpha_n short: <alpha_n^vee, alpha_{n-1}> = -2
      break;
    case 'C':
      if (n < 2) throw std::invalid_argument("type C requires rank >= 2");
      for (std::size_t i = 0; i + 1 < n; ++i) link(i, i + 1);
      a[n - 2][n - 1] = -2;  // alpha_n long
      break;
    case 'D':
      if (n < 4) throw std::invalid_argument("type D requires rank >= 4");
      for (std::size_t i = 0; i + 2 < n; ++i) link(i, i + 1);
      link(n - 3, n - 1);
      break;
    case 'G':
      if (n != 2) throw std::invalid_argument("type G requires rank 2");
      a[0][1] = -1;
      a[1][0] = -3;  // alpha_1 long
      break;
    default:
      throw std::invalid_argument(std::string("unsupported simple type '") + type + "'");
  }
  return a;
}

}  // namespace detail

/// Builds root data for a Cartan matrix. Throws for matrices that are not of
/// finite type (positive definite symmetrization, finite root system).
inline CartanData cartan_data_from_matrix(std::string label, const std::vector<std::vector<long>>& a) {
  CartanData cd;
  cd.type_label = std::move(label);
  cd.rank = a.size();
  const std::size_t n = cd.rank;
  if (n == 0) throw std::invalid_argument("empty Cartan matrix");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("Cartan matrix must be square");
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i][i] != 2) throw std::invalid_argument("Cartan matrix diagonal must be 2");
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && (a[i][j] > 0 || ((a[i][j] == 0) != (a[j][i] == 0))))
        throw std::invalid_argument("Cartan matrix has invalid off-diagonal pattern");
  }
  cd.cartan_matrix = a;

  // Symmetrizer d_i a_ij = d_j a_ji, propagated along the (connected) Dynkin diagram.
  std::vector<std::optional<Rational>> d(n);
  d[0] = Rational(1);
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i] && !d[j] && a[i][j] != 0) {
          d[j] = *d[i] * a[i][j] / Rational(a[j][i]);
          grew = true;
        }
  }
  Rational dmax = 0;
  for (auto& x : d) {
    if (!x) throw std::invalid_argument("Cartan matrix is decomposable (Dynkin diagram not connected)");
    dmax = std::max(dmax, *x);
  }
  for (std::size_t i = 0; i < n; ++i) cd.half_lengths.push_back(*d[i] / dmax);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (cd.half_lengths[i] * a[i][j] != cd.half_lengths[j] * a[j][i])
        throw std::invalid_argument("Cartan matrix is not symmetrizable");

  QMatrix am(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) am(i, j) = a[i][j];
  QMatrix dm(n, n);
  for (std::size_t i = 0; i < n; ++i) dm(i, i) = cd.half_lengths[i];
  const QMatrix ainv = inverse(am);
  cd.bilinear_form = dm * ainv;  // (omega_i, omega_j) = d_i (A^{-1})_ij
  cd.simple_roots = am.transpose();
  cd.fundamental_weights = ainv.transpose();  // omega_i = sum_j (A^{-1})_{ji} alpha_j

  // Positive definiteness via Sylvester's criterion on (alpha_i, alpha_j) = d_i a_ij.
  const QMatrix sym = dm * am;
  for (std::size_t k = 1; k <= n; ++k) {
    QMatrix minor(k, k);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor(i, j) = sym(i, j);
    Rational det = 1;
    QMatrix m = minor;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t p = c;
      while (p < k && m(p, c) == 0) ++p;
      if (p == k) {
        det = 0;
        break;
      }
      if (p != c) {
        for (std::size_t j = 0; j < k; ++j) std::swap(m(p, j), m(c, j));
        det = -det;
      }
      det *= m(c, c);
      for (std::size_t i = c + 1; i < k; ++i) {
        const Rational f = m(i, c) / m(c, c);
        for (std::size_t j = c; j < k; ++j) m(i, j) -= f * m(c, j);
      }
    }
    if (det <= 0) throw std::invalid_argument("Cartan matrix is not of finite type");
  }

  // Positive roots by height using root strings: beta + alpha_i is a root iff q > 0,
  // where p - q = <beta, alpha_i^vee> and p is read off the roots already found.
  std::set<RootVec> found;
  std::vector<RootVec> layer;
  for (std::size_t i = 0; i < n; ++i) {
    RootVec r(n, 0);
    r[i] = 1;
    layer.push_back(r);
    found.insert(r);
  }
  std::vector<RootVec> all = layer;
  constexpr std::size_t kMaxRoots = 1000;
  while (!layer.empty()) {
    std::set<RootVec> next;
    for (const auto& beta : layer)
      for (std::size_t i = 0; i < n; ++i) {
        long pairing = 0;
        for (std::size_t j = 0; j < n; ++j) pairing += beta[j] * a[i][j];
        long p = 0;
        RootVec down = beta;
        while (true) {
          down[i] -= 1;
          if (!found.count(down)) break;
          ++p;
        }
        if (p - pairing > 0) {
          RootVec up = beta;
          up[i] += 1;
          if (!found.count(up)) next.insert(up);
        }
      }
    layer.assign(next.begin(), next.end());
    for (const auto& r : layer) found.insert(r);
    all.insert(all.end(), layer.begin(), layer.end());
    if (all.size() > kMaxRoots) throw std::invalid_argument("root system too large (not of finite type?)");
  }
  auto height = [](const RootVec& r) { return std::accumulate(r.begin(), r.end(), 0L); };
  std::stable_sort(all.begin(), all.end(), [&](const RootVec& x, const RootVec& y) {
    if (height(x) != height(y)) return height(x) < height(y);
    return x > y;
  });
  cd.positive_roots = all;
  cd.theta = all.back();
  cd.rho = Weight(n, 1);
  // (theta, theta) = 2 by normalization of d; h^vee = 1 + (rho, theta).
  const Rational h = 1 + cd.form(CartanData::to_q(cd.rho), cd.root_to_weight(cd.theta));
  if (!is_integer(h)) throw std::logic_error("dual Coxeter number is not an integer");
  cd.dual_coxeter = h.get_num().get_si();
  return cd;
}

/// Builds Cartan data for labels like "A1", "A_2", "B2", "G2".
inline CartanData build_cartan_data(const std::string& type_label) {
  static const std::regex pattern(R"(^\s*([A-Ga-g])_?(\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(type_label, m, pattern)) throw std::invalid_argument("unsupported type label '" + type_label + "'");
  const char type = static_cast<char>(std::toupper(m[1].str()[0]));
  const std::size_t n = std::stoul(m[2].str());
  if (n == 0 || n > 8) throw std::invalid_argument("unsupported rank in '" + type_label + "'");
  if (type == 'E' || type == 'F') throw std::invalid_argument("exceptional type '" + type_label + "' is not supported");
  return cartan_data_from_matrix(std::string(1, type) + std::to_string(n), detail::cartan_matrix_for(type, n));
}

/// Dual Coxeter number recomputed from the marks of the highest coroot:
/// theta^vee = sum_i a_i^vee alpha_i^vee and h^vee = 1 + sum_i a_i^vee.
inline long dual_coxeter_from_marks(const CartanData& cd) {
  Rational s = 1;
  const auto tw = cd.root_to_weight(cd.theta);
  const Rational tt = cd.form(tw, tw);
  for (std::size_t i = 0; i < cd.rank; ++i) s += cd.theta[i] * cd.half_lengths[i] * 2 / tt;
  return s.get_num().get_si();
}

// ---------------------------------------------------------------------------

enum class ElementKind { Raising, Cartan, Lowering };

struct BasisElementInfo {
  ElementKind kind;
  RootVec root;             // signed root for root vectors, zero for Cartan elements
  std::vector<Rational> coroot_coefficients;  // Cartan elements: h = sum_i c_i h_i
  std::size_t sigma = 0;    // index of the image under the Chevalley anti-involution
};

/// A basis of g with exact structure constants, realized by matrices.
struct AlgebraBasis {
  CartanData cartan;
  std::size_t dimension = 0;
  std::vector<BasisElementInfo> info;
  std::vector<QMatrix> matrices;     // defining-representation realization
  /// bracket[a][b] = coordinates of [x_a, x_b]
  std::vector<std::vector<QVector>> bracket;
  QMatrix gram;          // (x_a, x_b)
  QMatrix gram_inverse;  // dual basis: x^a = sum_b gram_inverse(a, b) x_b
  std::vector<std::size_t> e, f, h;  // Chevalley generators per simple root

  const QVector& bracket_of(std::size_t a, std::size_t b) const { return bracket[a][b]; }

  Rational form(const QVector& x, const QVector& y) const {
    Rational s = 0;
    for (std::size_t a = 0; a < dimension; ++a) {
      if (x[a] == 0) continue;
      for (std::size_t b = 0; b < dimension; ++b)
        if (y[b] != 0) s += x[a] * gram(a, b) * y[b];
    }
    return s;
  }

  QVector bracket_vec(const QVector& x, const QVector& y) const {
    QVector out(dimension, Rational(0));
    for (std::size_t a = 0; a < dimension; ++a) {
      if (x[a] == 0) continue;
      for (std::size_t b = 0; b < dimension; ++b) {
        if (y[b] == 0) continue;
        const Rational s = x[a] * y[b];
        for (std::size_t c = 0; c < dimension; ++c)
          if (bracket[a][b][c] != 0) out[c] += s * bracket[a][b][c];
      }
    }
    return out;
  }

  QVector unit(std::size_t a) const {
    QVector v(dimension, Rational(0));
    v[a] = 1;
    return v;
  }

  /// Pairs (a, b, coefficient) with coefficient = gram_inverse(a, b) != 0; the
  /// Casimir tensor is sum coefficient * x_a (x) x_b.
  std::vector<std::tuple<std::size_t, std::size_t, Rational>> casimir_terms() const {
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> t;
    for (std::size_t a = 0; a < dimension; ++a)
      for (std::size_t b = 0; b < dimension; ++b)
        if (gram_inverse(a, b) != 0) t.emplace_back(a, b, gram_inverse(a, b));
    return t;
  }
};

/// Orthogonal presentation of the basis: vectors u_i (in basis coordinates) with
/// (u_i, u_j) = norms[i] delta_ij, norms rational. Dividing u_i by sqrt(norms[i])
/// gives an orthonormal basis; exact code never needs that step.
struct OrthogonalView {
  std::vector<QVector> vectors;
  std::vector<Rational> norms;
};

inline OrthogonalView orthogonal_view(const AlgebraBasis& basis) {
  // Gram-Schmidt over the rationals on the symmetric combinations x + sigma(x)
  // and x - sigma(x), which are anisotropic for the compact-type pairing.
  OrthogonalView view;
  std::vector<QVector> seeds;
  for (std::size_t a = 0; a < basis.dimension; ++a) {
    const std::size_t s = basis.info[a].sigma;
    if (basis.info[a].kind == ElementKind::Cartan) {
      seeds.push_back(basis.unit(a));
    } else if (basis.info[a].kind == ElementKind::Raising) {
      QVector plus = basis.unit(a), minus = basis.unit(a);
      plus[s] += 1;
      minus[s] -= 1;
      seeds.push_back(plus);
      seeds.push_back(minus);
    }
  }
  for (auto v : seeds) {
    for (std::size_t k = 0; k < view.vectors.size(); ++k) {
      const Rational c = basis.form(view.vectors[k], v) / view.norms[k];
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * view.vectors[k][i];
    }
    const Rational nrm = basis.form(v, v);
    if (nrm == 0) throw std::logic_error("orthogonal_view: isotropic vector");
    view.vectors.push_back(v);
    view.norms.push_back(nrm);
  }
  return view;
}

namespace detail {

/// sl(N) realization: E_ij for roots, H_i = E_ii - E_{i+1,i+1} for coroots.
inline void realize_type_a(AlgebraBasis& basis) {
  const auto& cd = basis.cartan;
  const std::size_t n = cd.rank, big_n = n + 1;
  auto unit_matrix = [&](std::size_t i, std::size_t j) {
    QMatrix m(big_n, big_n);
    m(i, j) = 1;
    return m;
  };
  // Root alpha_i + ... + alpha_{j-1} <-> E_{i,j}
  std::vector<std::pair<std::size_t, std::size_t>> pos;
  for (const auto& r : cd.positive_roots) {
    std::size_t i = 0;
    while (r[i] == 0) ++i;
    std::size_t j = i;
    while (j < n && r[j] == 1) ++j;
    pos.emplace_back(i, j);
  }
  const std::size_t np = pos.size();
  for (std::size_t k = 0; k < np; ++k) {
    basis.matrices.push_back(unit_matrix(pos[k].first, pos[k].second));
    basis.info.push_back({ElementKind::Raising, cd.positive_roots[k], {}, 0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    QMatrix h(big_n, big_n);
    h(i, i) = 1;
    h(i + 1, i + 1) = -1;
    basis.matrices.push_back(h);
    std::vector<Rational> c(n, Rational(0));
    c[i] = 1;
    basis.info.push_back({ElementKind::Cartan, RootVec(n, 0), c, 0});
  }
  for (std::size_t k = 0; k < np; ++k) {
    basis.matrices.push_back(unit_matrix(pos[k].second, pos[k].first));
    RootVec neg = cd.positive_roots[k];
    for (auto& x : neg) x = -x;
    basis.info.push_back({ElementKind::Lowering, neg, {}, 0});
  }
  for (std::size_t k = 0; k < np; ++k) {
    basis.info[k].sigma = np + n + k;
    basis.info[np + n + k].sigma = k;
  }
  for (std::size_t i = 0; i < n; ++i) basis.info[np + i].sigma = np + i;
}

}  // namespace detail

/// Builds a basis of g with exact structure constants and the normalized form.
/// Realizations exist for type A; other types have Cartan data only.
inline AlgebraBasis build_algebra_basis(const CartanData& cd) {
  AlgebraBasis basis;
  basis.cartan = cd;
  if (cd.type_label.empty() || cd.type_label[0] != 'A')
    throw std::invalid_argument("no matrix realization available for type " + cd.type_label);
  detail::realize_type_a(basis);
  const std::size_t dim = basis.matrices.size();
  basis.dimension = dim;

  // Structure constants by expressing commutators in the basis.
  const std::size_t m2 = basis.matrices[0].rows() * basis.matrices[0].cols();
  QMatrix flat(m2, dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t k = 0; k < m2; ++k) flat(k, a) = basis.matrices[a].data()[k];
  QMatrix commutators(m2, dim * dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const QMatrix c = commutator(basis.matrices[a], basis.matrices[b]);
      for (std::size_t k = 0; k < m2; ++k) commutators(k, a * dim + b) = c.data()[k];
    }
  const QMatrix coords = coordinates_in(flat, commutators);
  basis.bracket.assign(dim, std::vector<QVector>(dim));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) basis.bracket[a][b] = coords.column(a * dim + b);

  // Trace form, rescaled so (h_1, h_1) = (alpha_1^vee, alpha_1^vee) = 2 / d_1.
  QMatrix trace_form(dim, dim);
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const QMatrix p = basis.matrices[a] * basis.matrices[b];
      Rational t = 0;
      for (std::size_t i = 0; i < p.rows(); ++i) t += p(i, i);
      trace_form(a, b) = t;
    }

  const std::size_t n = cd.rank;
  basis.e.resize(n);
  basis.f.resize(n);
  basis.h.resize(n);
  for (std::size_t a = 0; a < dim; ++a) {
    const auto& inf = basis.info[a];
    if (inf.kind == ElementKind::Cartan) {
      for (std::size_t i = 0; i < n; ++i)
        if (inf.coroot_coefficients[i] == 1) basis.h[i] = a;
    } else {
      long height = 0;
      std::size_t which = 0;
      for (std::size_t i = 0; i < n; ++i) {
        height += inf.root[i];
        if (inf.root[i] != 0) which = i;
      }
      if (height == 1) basis.e[which] = a;
      if (height == -1) basis.f[which] = a;
    }
  }
  const Rational scale = (2 / cd.half_lengths[0]) / trace_form(basis.h[0], basis.h[0]);
  basis.gram = trace_form * scale;
  basis.gram_inverse = inverse(basis.gram);
  return basis;
}

/// Jacobi residual [[a,b],c] + [[b,c],a] + [[c,a],b] for basis triples.
inline bool jacobi_holds(const AlgebraBasis& basis, std::size_t a, std::size_t b, std::size_t c) {
  const auto ab = basis.bracket[a][b];
  const auto bc = basis.bracket[b][c];
  const auto ca = basis.bracket[c][a];
  QVector r = basis.bracket_vec(ab, basis.unit(c));
  const QVector r2 = basis.bracket_vec(bc, basis.unit(a));
  const QVector r3 = basis.bracket_vec(ca, basis.unit(b));
  for (std::size_t i = 0; i < r.size(); ++i) r[i] += r2[i] + r3[i];
  return is_zero(r);
}

}  // namespace wznw

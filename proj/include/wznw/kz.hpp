#pragma once

// Omega operators, the KZ connection, the four-point reduction to a Fuchsian
// ODE on {0, 1, infinity}, and its Frobenius solutions in exact arithmetic.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wznw/exact.hpp"
#include "wznw/liealg.hpp"
#include "wznw/repn.hpp"

namespace wznw {

struct OmegaOperator {
  std::size_t l = 0, p = 0;  // slots, 0-based
  QSparse matrix;
};

/// Omega_lp = sum_a x_a (x) x^a in slots l and p.
inline OmegaOperator omega(const TensorSpace& ts, std::size_t l, std::size_t p) {
  if (l == p) throw std::invalid_argument("omega: slots must differ");
  if (l >= ts.size() || p >= ts.size()) throw std::out_of_range("omega: slot out of range");
  return OmegaOperator{l, p, ts.casimir_pair(l, p)};
}

inline QSparse sparse_commutator(const QSparse& a, const QSparse& b) { return a * b - b * a; }

struct BraidReport {
  std::size_t relations_checked = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// [Omega_lp, Omega_lq + Omega_pq] = 0 for distinct l, p, q and
/// [Omega_lp, Omega_qr] = 0 for disjoint pairs.
inline BraidReport check_braid_relations(const TensorSpace& ts) {
  const std::size_t n = ts.size();
  std::vector<std::vector<QSparse>> om(n, std::vector<QSparse>(n));
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t p = l + 1; p < n; ++p) {
      om[l][p] = omega(ts, l, p).matrix;
      om[p][l] = om[l][p];
    }
  BraidReport rep;
  auto fail = [&](const std::string& what) { rep.failures.push_back(what); };
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        if (l == p || l == q || p == q) continue;
        ++rep.relations_checked;
        if (!sparse_commutator(om[l][p], om[l][q] + om[p][q]).is_zero())
          fail("[O" + std::to_string(l) + std::to_string(p) + ", O" + std::to_string(l) + std::to_string(q) + " + O" +
               std::to_string(p) + std::to_string(q) + "] != 0");
      }
  for (std::size_t l = 0; l < n; ++l)
    for (std::size_t p = l + 1; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q)
        for (std::size_t r = q + 1; r < n; ++r) {
          if (q == l || q == p || r == l || r == p) continue;
          ++rep.relations_checked;
          if (!sparse_commutator(om[l][p], om[q][r]).is_zero())
            fail("[O" + std::to_string(l) + std::to_string(p) + ", O" + std::to_string(q) + std::to_string(r) + "] != 0");
        }
  return rep;
}

/// The KZ system kappa d_l phi = sum_{p != l} Omega_lp / (x_l - x_p) phi.
class KZSystem {
 public:
  KZSystem(const AlgebraBasis& g, const Rational& k, std::vector<Irrep> factors) : ts_(g, std::move(factors)) {
    kappa_ = k + g.cartan.dual_coxeter;
    if (kappa_ == 0) throw std::invalid_argument("assemble_kz: level equals minus the dual Coxeter number");
    level_ = k;
    const std::size_t n = ts_.size();
    omegas_.assign(n, std::vector<QSparse>(n));
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t p = l + 1; p < n; ++p) {
        omegas_[l][p] = omega(ts_, l, p).matrix;
        omegas_[p][l] = omegas_[l][p];
      }
  }

  std::size_t points() const { return ts_.size(); }
  const Rational& kappa() const { return kappa_; }
  const Rational& level() const { return level_; }
  const TensorSpace& ambient() const { return ts_; }
  const QSparse& omega_matrix(std::size_t l, std::size_t p) const { return omegas_.at(l).at(p); }

  /// How :(x_l - x_p)^{-1}: is expanded for the ordered pair (l, p): in
  /// nonnegative powers of the later variable over the earlier one.
  std::string expansion_convention(std::size_t l, std::size_t p) const {
    if (l == p) throw std::invalid_argument("expansion_convention: slots must differ");
    const std::size_t a = std::min(l, p), b = std::max(l, p);
    const std::string s = "sum_{m>=0} x" + std::to_string(b) + "^m x" + std::to_string(a) + "^{-m-1}";
    return l < p ? s : "-(" + s + ")";
  }

  /// A_l at a point with pairwise distinct rational coordinates.
  QSparse connection(std::size_t l, const std::vector<Rational>& x) const {
    check_point(x);
    QSparse a(ts_.dimension(), ts_.dimension());
    for (std::size_t p = 0; p < points(); ++p)
      if (p != l) a = a + (1 / (kappa_ * (x[l] - x[p]))) * omegas_[l][p];
    return a;
  }

  /// d A_p / d x_l at x.
  QSparse connection_derivative(std::size_t p, std::size_t l, const std::vector<Rational>& x) const {
    check_point(x);
    QSparse d(ts_.dimension(), ts_.dimension());
    if (l == p) {
      for (std::size_t q = 0; q < points(); ++q)
        if (q != p) d = d + (-1 / (kappa_ * (x[p] - x[q]) * (x[p] - x[q]))) * omegas_[p][q];
    } else {
      d = (1 / (kappa_ * (x[p] - x[l]) * (x[p] - x[l]))) * omegas_[p][l];
    }
    return d;
  }

  /// Zero curvature d_l A_p - d_p A_l + [A_l, A_p] = 0 at x, for all l < p.
  bool flat_at(const std::vector<Rational>& x) const {
    for (std::size_t l = 0; l < points(); ++l)
      for (std::size_t p = l + 1; p < points(); ++p) {
        const QSparse al = connection(l, x), ap = connection(p, x);
        const QSparse f = connection_derivative(p, l, x) - connection_derivative(l, p, x) + sparse_commutator(al, ap);
        if (!f.is_zero()) return false;
      }
    return true;
  }

 private:
  void check_point(const std::vector<Rational>& x) const {
    if (x.size() != points()) throw std::invalid_argument("KZSystem: wrong number of coordinates");
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (x[i] == x[j]) throw std::domain_error("KZSystem: coinciding insertion points");
  }

  TensorSpace ts_;
  Rational kappa_, level_;
  std::vector<std::vector<QSparse>> omegas_;
};

inline KZSystem assemble_kz(const AlgebraBasis& g, const Rational& k, const std::vector<Weight>& weights) {
  std::vector<Irrep> factors;
  for (const auto& w : weights) factors.push_back(build_irrep(g, w));
  return KZSystem(g, k, std::move(factors));
}

/// Restriction of an operator preserving span(basis) to that span.
inline QMatrix restrict_to(const QSparse& op, const QMatrix& basis) {
  QMatrix image(basis.rows(), basis.cols());
  for (std::size_t c = 0; c < basis.cols(); ++c) image.set_column(c, wznw::apply(op, basis.column(c)));
  return coordinates_in(basis, image);
}

/// kappa d psi/dz = (B0/z + B1/(z-1)) psi on the invariants of
/// L(l0)* (x) L(l1) (x) L(l2) (x) L(l3), with x1 = 1, x2 = z, x3 = 0.
struct FuchsianODE {
  Rational kappa;
  Rational level;
  std::vector<Weight> weights;
  QMatrix carrier;  // invariant vectors as columns in the tensor space
  QMatrix b0, b1;
  std::size_t dimension() const { return b0.rows(); }
  QMatrix b_infinity() const { return -(b0 + b1); }
  /// Residues in the local variable at a base point (w = 1 - z at z = 1).
  std::pair<QMatrix, QMatrix> local_residues(int base_point) const {
    if (base_point == 0) return {b0, b1};
    if (base_point == 1) return {b1, b0};
    throw std::invalid_argument("base point must be 0 or 1");
  }
};

inline FuchsianODE reduce_four_point(const AlgebraBasis& g, const Rational& k, const Weight& l0, const Weight& l1,
                                     const Weight& l2, const Weight& l3) {
  const auto& cd = g.cartan;
  for (const auto* w : {&l0, &l1, &l2, &l3})
    if (w->size() != cd.rank || !is_dominant_integral(*w)) throw std::invalid_argument("reduce_four_point: weights must be dominant integral");
  FuchsianODE ode;
  ode.kappa = k + cd.dual_coxeter;
  if (ode.kappa == 0) throw std::invalid_argument("reduce_four_point: level equals minus the dual Coxeter number");
  ode.level = k;
  ode.weights = {l0, l1, l2, l3};
  TensorSpace ts(g, {dualize(g, build_irrep(g, l0)), build_irrep(g, l1), build_irrep(g, l2), build_irrep(g, l3)});
  ode.carrier = invariant_subspace(ts).basis;
  if (ode.carrier.cols() == 0) throw std::runtime_error("reduce_four_point: empty invariant subspace, no blocks exist");
  ode.b0 = restrict_to(omega(ts, 2, 3).matrix, ode.carrier);
  ode.b1 = restrict_to(omega(ts, 1, 2).matrix, ode.carrier);
  return ode;
}

// ---------------------------------------------------------------------------
// Exact diagonalization of rational matrices with rational spectrum

struct ExactEigen {
  std::vector<Rational> values;  // one per column of vectors
  QMatrix vectors;
  QMatrix inverse_vectors;
};

/// Best rational approximation with denominator at most max_den.
inline Rational rationalize(double x, long max_den = 1000000) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double frac = r - a;
    if (std::abs(static_cast<double>(p1) / static_cast<double>(q1) - x) < 1e-12 * std::max(1.0, std::abs(x)) || frac < 1e-15) break;
    r = 1 / frac;
  }
  return Rational(p1, q1);
}

/// Diagonalizes a rational matrix whose eigenvalues are rational. Eigenvalue
/// candidates come from a floating-point solve and are confirmed exactly by
/// nullities summing to the dimension; anything else is a domain_error.
inline ExactEigen exact_eigen(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("exact_eigen: matrix not square");
  Eigen::MatrixXd md(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) md(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j).get_d();
  Eigen::EigenSolver<Eigen::MatrixXd> es(md, false);
  std::set<Rational> candidates;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) > 1e-6) throw std::domain_error("exact_eigen: complex eigenvalue");
    candidates.insert(rationalize(ev.real()));
  }
  ExactEigen out;
  out.vectors = QMatrix(n, n);
  std::size_t col = 0;
  for (const auto& lam : candidates) {
    QMatrix shifted = m - lam * QMatrix::identity(n);
    const QMatrix ker = nullspace(shifted);
    for (std::size_t c = 0; c < ker.cols(); ++c) {
      if (col >= n) throw std::domain_error("exact_eigen: eigenvector count exceeds dimension");
      out.vectors.set_column(col++, ker.column(c));
      out.values.push_back(lam);
    }
  }
  if (col != n) throw std::domain_error("exact_eigen: spectrum not rational or matrix not diagonalizable");
  out.inverse_vectors = inverse(out.vectors);
  return out;
}

// ---------------------------------------------------------------------------
// Frobenius solutions

class LogTermError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// psi = t^r sum_m c_m t^m with t = z (base 0) or t = 1 - z (base 1).
struct FrobeniusSolution {
  int base_point = 0;
  Rational exponent;
  std::vector<QVector> coefficients;  // c_0 .. c_M in carrier coordinates
  std::size_t order() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
};

/// Exponents at a base point: eigenvalues of the local residue over kappa,
/// with multiplicity, in the order of exact_eigen.
inline std::vector<Rational> local_exponents(const FuchsianODE& ode, int base_point) {
  std::vector<Rational> r;
  for (const auto& v : exact_eigen(ode.local_residues(base_point).first).values) r.push_back(v / ode.kappa);
  return r;
}

/// The series solution attached to eigenvector s of the local residue.
/// Coefficients solve (kappa (r+m) - B) c_m = -B' sum_{i<m} c_i in the
/// eigenbasis of B. A resonant component with a nonzero right-hand side would
/// need a logarithm and raises LogTermError.
inline FrobeniusSolution frobenius_solution(const FuchsianODE& ode, int base_point, std::size_t order, const ExactEigen& eig,
                                            std::size_t s) {
  if (order < 1) throw std::invalid_argument("frobenius_solutions: truncation order must be at least 1");
  const auto [b, bother] = ode.local_residues(base_point);
  const std::size_t n = ode.dimension();
  const QMatrix other = eig.inverse_vectors * bother * eig.vectors;  // B' in the eigenbasis
  FrobeniusSolution sol;
  sol.base_point = base_point;
  sol.exponent = eig.values.at(s) / ode.kappa;
  std::vector<QVector> d;  // eigenbasis coordinates
  QVector d0(n, Rational(0));
  d0[s] = 1;
  d.push_back(d0);
  QVector partial = d0;  // sum_{i<m} d_i
  for (std::size_t m = 1; m <= order; ++m) {
    const QVector rhs0 = other * partial;
    QVector dm(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j) {
      const Rational diag = ode.kappa * (sol.exponent + static_cast<long>(m)) - eig.values[j];
      const Rational rhs = -rhs0[j];
      if (diag == 0) {
        if (rhs != 0) {
          std::ostringstream msg;
          msg << "logarithmic term required: exponent " << sol.exponent << " at z = " << base_point << ", order " << m;
          throw LogTermError(msg.str());
        }
      } else {
        dm[j] = rhs / diag;
      }
    }
    for (std::size_t j = 0; j < n; ++j) partial[j] += dm[j];
    d.push_back(std::move(dm));
  }
  for (const auto& dv : d) sol.coefficients.push_back(eig.vectors * dv);
  return sol;
}

/// One solution per eigenvector of the local residue.
inline std::vector<FrobeniusSolution> frobenius_solutions(const FuchsianODE& ode, int base_point, std::size_t order) {
  const ExactEigen eig = exact_eigen(ode.local_residues(base_point).first);
  std::vector<FrobeniusSolution> out;
  for (std::size_t s = 0; s < ode.dimension(); ++s) out.push_back(frobenius_solution(ode, base_point, order, eig, s));
  return out;
}

/// Largest m such that the ODE, multiplied through by t (t - 1), is satisfied
/// by the truncated series through t^{r+m}; equals the order when correct.
inline std::size_t frobenius_residual_order(const FuchsianODE& ode, const FrobeniusSolution& sol) {
  const auto [b, bother] = ode.local_residues(sol.base_point);
  const auto& c = sol.coefficients;
  const std::size_t n = ode.dimension();
  // kappa t (t-1) psi' = ((t-1) B + t B') psi, coefficient of t^{r+m}
  for (std::size_t m = 0; m <= sol.order(); ++m) {
    QVector lhs(n, Rational(0)), rhs(n, Rational(0));
    const QVector bc = b * c[m];
    for (std::size_t i = 0; i < n; ++i) {
      lhs[i] -= ode.kappa * (sol.exponent + static_cast<long>(m)) * c[m][i];
      rhs[i] -= bc[i];
    }
    if (m > 0) {
      const QVector bcp = b * c[m - 1], ocp = bother * c[m - 1];
      for (std::size_t i = 0; i < n; ++i) {
        lhs[i] += ode.kappa * (sol.exponent + static_cast<long>(m) - 1) * c[m - 1][i];
        rhs[i] += bcp[i] + ocp[i];
      }
    }
    if (lhs != rhs) return m == 0 ? 0 : m - 1;
  }
  return sol.order();
}

// ---------------------------------------------------------------------------
// sl(2) fusion

struct FusionRule {
  Rational level, j1, j2;
  std::vector<Rational> channels;  // admissible j3, increasing
};

inline void check_sl2_spin(const Rational& k, const Rational& j, const char* name) {
  if (!is_integer(2 * j) || j < 0) throw std::invalid_argument(std::string("fusion_rules_sl2: ") + name + " must be a nonnegative half-integer");
  if (2 * j > k) throw std::invalid_argument(std::string("fusion_rules_sl2: ") + name + " exceeds level/2");
}

/// |j1 - j2| <= j3 <= min(j1 + j2, k - j1 - j2), in integer steps.
inline FusionRule fusion_rules_sl2(const Rational& k, const Rational& j1, const Rational& j2) {
  if (!is_integer(k) || k < 0) throw std::invalid_argument("fusion_rules_sl2: level must be a nonnegative integer");
  check_sl2_spin(k, j1, "j1");
  check_sl2_spin(k, j2, "j2");
  FusionRule fr{k, j1, j2, {}};
  const Rational lo = abs(j1 - j2);
  const Rational hi = std::min(Rational(j1 + j2), Rational(k - j1 - j2));
  for (Rational j3 = lo; j3 <= hi; j3 += 1) fr.channels.push_back(j3);
  return fr;
}

// ---------------------------------------------------------------------------
// Products of blocks for tensor-product vertex operator algebras

/// Coefficientwise Cauchy product; vector coefficients multiply by Kronecker
/// product, exponents add.
inline FrobeniusSolution factor_blocks(const std::vector<FrobeniusSolution>& factors) {
  if (factors.empty()) throw std::invalid_argument("factor_blocks: no factors");
  FrobeniusSolution acc = factors.front();
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const auto& s = factors[f];
    if (s.order() != acc.order()) throw std::invalid_argument("factor_blocks: mismatched truncation orders");
    if (s.base_point != acc.base_point) throw std::invalid_argument("factor_blocks: mismatched base points");
    FrobeniusSolution next;
    next.base_point = acc.base_point;
    next.exponent = acc.exponent + s.exponent;
    const std::size_t na = acc.coefficients[0].size(), ns = s.coefficients[0].size();
    for (std::size_t m = 0; m <= acc.order(); ++m) {
      QVector c(na * ns, Rational(0));
      for (std::size_t i = 0; i <= m; ++i)
        for (std::size_t a = 0; a < na; ++a)
          for (std::size_t b = 0; b < ns; ++b) c[a * ns + b] += acc.coefficients[i][a] * s.coefficients[m - i][b];
      next.coefficients.push_back(std::move(c));
    }
    acc = std::move(next);
  }
  return acc;
}

}  // namespace wznw

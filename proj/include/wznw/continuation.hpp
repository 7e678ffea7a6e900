#pragma once

// Analytic continuation of solutions of the four-point Fuchsian system:
// series evaluation with tail bounds, Taylor-method transport along
// polygonal paths, connection and monodromy matrices, and the checks built on
// them (extension property, associativity, n-point convergence, fusion by
// exponent filtering).

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wznw/exact.hpp"
#include "wznw/kz.hpp"
#include "wznw/liealg.hpp"
#include "wznw/numeric.hpp"
#include "wznw/repn.hpp"

namespace wznw {

class ContinuationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Series evaluation

struct SeriesValue {
  CVector value;
  Real tail_bound;
};

/// Evaluates t^r sum_m c_m t^m at t = z (base 0) or t = 1 - z (base 1). The
/// prefactor uses the principal branch of log t unless `prefactor_arg` fixes
/// the argument of t. The tail bound is the geometric estimate
/// max_{last 5 m} |c_m| |t|^{M+1} / (1 - |t|) times |t^r|, valid heuristically
/// inside the unit disc where the nearest other singular point lies.
inline SeriesValue evaluate_series(const FrobeniusSolution& sol, const Complex& z, const Real& tolerance,
                                   const std::optional<Real>& prefactor_arg = std::nullopt) {
  const Complex t = sol.base_point == 0 ? z : Complex(1) - z;
  const Real at = abs(t);
  if (at == 0) throw std::domain_error("evaluate_series: evaluation at the base point");
  if (at >= 1) throw std::domain_error("evaluate_series: point outside the disc of convergence");
  const std::size_t n = sol.coefficients.front().size();
  CVector acc(n);
  Complex tp(1);
  Real cmax = 0;
  const std::size_t order = sol.order();
  for (std::size_t m = 0; m <= order; ++m) {
    for (std::size_t i = 0; i < n; ++i)
      if (sol.coefficients[m][i] != 0) acc[i] += Complex(sol.coefficients[m][i]) * tp;
    if (m + 5 > order) {
      Real norm = 0;
      for (const auto& x : sol.coefficients[m]) norm = std::max(norm, abs(to_real(x)));
      cmax = std::max(cmax, norm);
    }
    tp *= t;
  }
  Complex pre;
  if (prefactor_arg) {
    pre = exp(Complex(to_real(sol.exponent)) * Complex(boost::multiprecision::log(at), *prefactor_arg));
  } else {
    pre = pow(t, sol.exponent);
  }
  for (auto& x : acc) x *= pre;
  SeriesValue out;
  out.tail_bound = cmax * abs(tp) / (1 - at) * abs(pre);
  if (out.tail_bound > tolerance) {
    std::ostringstream msg;
    msg << "evaluate_series: tail bound " << out.tail_bound.str(6) << " exceeds tolerance at |t| = " << at.str(6);
    throw ContinuationError(msg.str());
  }
  out.value = std::move(acc);
  return out;
}

/// Columns are the solutions, rows the carrier coordinates.
inline CMatrix series_matrix(const std::vector<FrobeniusSolution>& sols, const Complex& z, const Real& tolerance,
                             const std::optional<Real>& prefactor_arg = std::nullopt) {
  if (sols.empty()) throw std::invalid_argument("series_matrix: no solutions");
  CMatrix m(sols.front().coefficients.front().size(), sols.size());
  for (std::size_t j = 0; j < sols.size(); ++j) m.set_column(j, evaluate_series(sols[j], z, tolerance, prefactor_arg).value);
  return m;
}

// ---------------------------------------------------------------------------
// Paths and transport

/// A polygonal path; arcs are added as chains of chords. Every segment keeps
/// at least `margin` away from 0 and 1.
class Path {
 public:
  explicit Path(Complex start, Real margin = Real(1) / 20) : margin_(std::move(margin)) { points_.push_back(std::move(start)); }

  Path& line_to(const Complex& z) {
    check_segment(points_.back(), z);
    points_.push_back(z);
    return *this;
  }

  /// Arc about `center` from the current point, sweeping `turns` full turns
  /// (negative for clockwise), in `pieces` chords.
  Path& arc(const Complex& center, const Real& turns, std::size_t pieces = 32) {
    const Complex d = points_.back() - center;
    const Real radius = abs(d), a0 = arg(d);
    for (std::size_t i = 1; i <= pieces; ++i) {
      const Real a = a0 + 2 * pi_real() * turns * Real(i) / Real(pieces);
      line_to(center + Complex(radius * boost::multiprecision::cos(a), radius * boost::multiprecision::sin(a)));
    }
    if (turns == boost::multiprecision::round(turns)) points_.back() = center + d;  // close loops exactly
    return *this;
  }

  Path& append(const Path& other) {
    if (abs(other.points_.front() - points_.back()) > margin_ * Real("1e-20"))
      throw std::invalid_argument("Path::append: paths do not meet");
    for (std::size_t i = 1; i < other.points_.size(); ++i) line_to(other.points_[i]);
    return *this;
  }

  Path reversed() const {
    Path p(points_.back(), margin_);
    for (std::size_t i = points_.size() - 1; i-- > 0;) p.line_to(points_[i]);
    return p;
  }

  const std::vector<Complex>& points() const { return points_; }
  const Real& margin() const { return margin_; }

  /// Smallest distance from the path to {0, 1}.
  Real clearance() const {
    Real best = 10;
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
      best = std::min({best, segment_distance(points_[i], points_[i + 1], Complex(0)), segment_distance(points_[i], points_[i + 1], Complex(1))});
    if (points_.size() == 1) best = std::min(abs(points_[0]), abs(points_[0] - Complex(1)));
    return best;
  }

  static Real segment_distance(const Complex& a, const Complex& b, const Complex& p) {
    const Complex ab = b - a, ap = p - a;
    const Real len2 = ab.re * ab.re + ab.im * ab.im;
    if (len2 == 0) return abs(ap);
    Real t = (ap.re * ab.re + ap.im * ab.im) / len2;
    t = std::clamp(t, Real(0), Real(1));
    return abs(p - (a + Complex(t) * ab));
  }

 private:
  void check_segment(const Complex& a, const Complex& b) const {
    if (segment_distance(a, b, Complex(0)) < margin_ || segment_distance(a, b, Complex(1)) < margin_)
      throw std::domain_error("Path: segment passes within the margin of a singular point");
  }

  Real margin_;
  std::vector<Complex> points_;
};

/// The residue data in floating point.
struct NumericODE {
  Real kappa;
  CMatrix b0, b1;
  std::size_t dimension() const { return b0.rows(); }
};

inline NumericODE to_numeric(const FuchsianODE& ode) { return NumericODE{to_real(ode.kappa), to_complex(ode.b0), to_complex(ode.b1)}; }

struct TransportStats {
  std::size_t steps = 0;
  std::size_t halvings = 0;
  std::size_t max_terms = 0;
};

/// One Taylor step of Phi' = A(z) Phi from z0 by h. Returns nullopt when the
/// series has not converged to `tol` within `max_terms`.
inline std::optional<CMatrix> taylor_step(const NumericODE& ode, const Complex& z0, const Complex& h, const CMatrix& phi,
                                          const Real& tol, std::size_t max_terms, std::size_t* terms_used = nullptr) {
  // A(z0 + s) = sum_n A_n s^n, A_n = (-1)^n / kappa (B0 / z0^{n+1} + B1 / (z0-1)^{n+1});
  // we carry hat A_n = A_n h^n and Psi_m = Phi_m h^m.
  const std::size_t d = ode.dimension();
  std::vector<CMatrix> ahat, psi;
  const Complex q0 = -h / z0, q1 = -h / (z0 - Complex(1));
  Complex p0 = Complex(1) / (Complex(ode.kappa) * z0), p1 = Complex(1) / (Complex(ode.kappa) * (z0 - Complex(1)));
  CMatrix sum = phi;
  psi.push_back(phi);
  const Real scale = std::max(max_abs(phi), Real(1));
  int small_run = 0;
  for (std::size_t m = 0; m + 1 < max_terms; ++m) {
    ahat.push_back(ode.b0 * p0 + ode.b1 * p1);
    p0 *= q0;
    p1 *= q1;
    CMatrix next(d, phi.cols());
    for (std::size_t n = 0; n <= m; ++n) next += ahat[n] * psi[m - n];
    next *= h / Complex(static_cast<int>(m + 1));
    sum += next;
    const Real size = max_abs(next);
    psi.push_back(std::move(next));
    if (size <= tol * scale) {
      if (++small_run >= 3) {
        if (terms_used) *terms_used = m + 2;
        return sum;
      }
    } else {
      small_run = 0;
    }
  }
  return std::nullopt;
}

/// Transports a fundamental matrix along a path. The step is capped at a
/// quarter of the distance to the nearest singular point and halved until the
/// Taylor series converges to 10^{-digits}.
inline CMatrix integrate_path(const NumericODE& ode, const Path& path, const CMatrix& initial, unsigned digits,
                              TransportStats* stats = nullptr) {
  const Real tol = epsilon_for(digits);
  const std::size_t max_terms = 8 * digits + 40;
  CMatrix phi = initial;
  const auto& pts = path.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Complex z = pts[i];
    const Complex end = pts[i + 1];
    while (abs(end - z) > 0) {
      const Real rho = std::min(abs(z), abs(z - Complex(1)));
      Complex h = end - z;
      if (abs(h) > rho / 4) h = h * Complex(rho / (4 * abs(h)));
      for (;;) {
        std::size_t used = 0;
        auto r = taylor_step(ode, z, h, phi, tol, max_terms, &used);
        if (r) {
          phi = std::move(*r);
          if (stats) {
            ++stats->steps;
            stats->max_terms = std::max(stats->max_terms, used);
          }
          break;
        }
        h = h * Complex(Real(1) / 2);
        if (stats) ++stats->halvings;
        if (abs(h) < rho * tol) throw ContinuationError("integrate_path: step size collapsed");
      }
      // snap onto the endpoint to avoid drift
      z = (abs(end - (z + h)) < abs(end) * tol) ? end : z + h;
    }
  }
  return phi;
}

/// Transport matrix P with psi(end) = P psi(start) along the path.
inline CMatrix transport(const NumericODE& ode, const Path& path, unsigned digits, TransportStats* stats = nullptr) {
  return integrate_path(ode, path, CMatrix::identity(ode.dimension()), digits, stats);
}

// ---------------------------------------------------------------------------
// Local fundamental matrices anywhere in the reliable discs

struct SolutionBases {
  std::vector<FrobeniusSolution> at0, at1;
};

inline SolutionBases solution_bases(const FuchsianODE& ode, std::size_t order) {
  return SolutionBases{frobenius_solutions(ode, 0, order), frobenius_solutions(ode, 1, order)};
}

/// Frobenius basis at its base point, continued radially to z: the series is
/// summed at distance min(|t|, 1/4) and transported along the ray from there.
inline CMatrix local_basis_at(const NumericODE& nod, const std::vector<FrobeniusSolution>& sols, const Complex& z, unsigned digits,
                              const Real& series_tol) {
  const int base = sols.front().base_point;
  const Complex origin = base == 0 ? Complex(0) : Complex(1);
  const Complex t = z - origin;
  const Real at = abs(t);
  if (at >= 1) throw std::domain_error("local_basis_at: point outside the disc around the base point");
  const Real anchor_r = Real(1) / 4;
  if (at <= anchor_r) return series_matrix(sols, z, series_tol);
  const Complex anchor = origin + t * Complex(anchor_r / at);
  Path ray(anchor, std::min(anchor_r, 1 - at) / 2);
  ray.line_to(z);
  return integrate_path(nod, ray, series_matrix(sols, anchor, series_tol), digits);
}

// ---------------------------------------------------------------------------
// Connection matrix

struct ConnectionMatrix {
  CMatrix matrix;  // basis at 0 = (basis at 1) * matrix on the overlap
  std::vector<Rational> exponents0, exponents1;
  unsigned digits = 0;
  std::size_t series_order = 0;
  Real condition_number;
  Real sample_error;  // max over samples of |Phi0(z) - Phi1(z) C|
  std::string branch = "principal log z and log(1 - z), both real on (0, 1)";
};

/// C = Phi1(1/2)^{-1} Phi0(1/2), each basis summed at distance 1/4 from its
/// base point and carried to 1/2; then checked against
/// Phi0 continued along the real axis and Phi1 summed at z in {0.35, 0.5, 0.65}.
inline ConnectionMatrix connection_matrix(const FuchsianODE& ode, std::size_t order, unsigned digits) {
  const SolutionBases bases = solution_bases(ode, order);
  const NumericODE nod = to_numeric(ode);
  const Real series_tol = Real("1e-6");
  ConnectionMatrix cm;
  cm.digits = digits;
  cm.series_order = order;
  for (const auto& s : bases.at0) cm.exponents0.push_back(s.exponent);
  for (const auto& s : bases.at1) cm.exponents1.push_back(s.exponent);
  const Complex half(Real(1) / 2);
  const CMatrix phi0 = local_basis_at(nod, bases.at0, half, digits, series_tol);
  const CMatrix phi1 = local_basis_at(nod, bases.at1, half, digits, series_tol);
  try {
    cm.matrix = inverse(phi1) * phi0;
  } catch (const std::domain_error&) {
    throw ContinuationError("connection_matrix: local basis at 1 is singular at z = 1/2");
  }
  cm.condition_number = condition_number(cm.matrix);
  cm.sample_error = 0;
  for (const char* zs : {"0.35", "0.5", "0.65"}) {
    const Complex z{Real(zs)};
    Path p(half);
    if (z != half) p.line_to(z);
    const CMatrix lhs = integrate_path(nod, p, phi0, digits);
    const CMatrix rhs = series_matrix(bases.at1, z, series_tol) * cm.matrix;
    cm.sample_error = std::max(cm.sample_error, max_abs(lhs - rhs) / std::max(Real(1), max_abs(lhs)));
  }
  return cm;
}

/// The same matrix computed through a path from 1/4 to 3/4 via `via`; paths
/// through the upper or lower half plane near the real segment are homotopic
/// to it.
inline CMatrix connection_matrix_via(const FuchsianODE& ode, std::size_t order, unsigned digits, const Complex& via) {
  const SolutionBases bases = solution_bases(ode, order);
  const NumericODE nod = to_numeric(ode);
  const Real series_tol = Real("1e-6");
  const Complex a(Real(1) / 4), b(Real(3) / 4);
  Path p(a);
  p.line_to(via).line_to(b);
  const CMatrix phi0_at_b = integrate_path(nod, p, series_matrix(bases.at0, a, series_tol), digits);
  return inverse(series_matrix(bases.at1, b, series_tol)) * phi0_at_b;
}

// ---------------------------------------------------------------------------
// Monodromy

enum class Loop { AroundZero, AroundOne, AroundInfinity };

/// Loops based at z = 1/2: counterclockwise circles of radius 1/2 about 0
/// and about 1, and a clockwise circle of radius 1 about 1/2 reached from
/// 1/2 - i. With P the transport matrices, P_inf P_0 P_1 = 1.
inline Path loop_path(Loop loop, std::size_t pieces = 48) {
  const Complex base(Real(1) / 2);
  Path p(base);
  switch (loop) {
    case Loop::AroundZero:
      p.arc(Complex(0), Real(1), pieces);
      break;
    case Loop::AroundOne:
      p.arc(Complex(1), Real(1), pieces);
      break;
    case Loop::AroundInfinity: {
      const Complex low(Real(1) / 2, Real(-1));
      p.line_to(low);
      p.arc(base, Real(-1), 2 * pieces);
      p.line_to(base);
      break;
    }
  }
  return p;
}

struct MonodromyMatrix {
  Loop loop = Loop::AroundZero;
  int basis_point = 0;      // Frobenius basis the matrix is expressed in
  CMatrix transport;        // carrier coordinates
  CMatrix matrix;           // Frobenius basis coordinates: Phi -> Phi * matrix
  std::vector<Rational> exponents;
};

inline MonodromyMatrix monodromy(const FuchsianODE& ode, Loop loop, std::size_t order, unsigned digits) {
  MonodromyMatrix mm;
  mm.loop = loop;
  mm.basis_point = loop == Loop::AroundOne ? 1 : 0;
  const auto sols = frobenius_solutions(ode, mm.basis_point, order);
  for (const auto& s : sols) mm.exponents.push_back(s.exponent);
  const NumericODE nod = to_numeric(ode);
  mm.transport = transport(nod, loop_path(loop), digits);
  const CMatrix phi = local_basis_at(nod, sols, Complex(Real(1) / 2), digits, Real("1e-6"));
  mm.matrix = inverse(phi) * mm.transport * phi;
  return mm;
}

/// Half-monodromy about 1: transport along the lower half circle from 1/2 to
/// 3/2, read in the Frobenius basis at 1 whose prefactor at 3/2 is taken real
/// (the standard branch of log(z - 1) there). Squares to the monodromy about 1.
inline CMatrix half_monodromy(const FuchsianODE& ode, std::size_t order, unsigned digits) {
  const auto sols = frobenius_solutions(ode, 1, order);
  const NumericODE nod = to_numeric(ode);
  Path p(Complex(Real(1) / 2));
  p.arc(Complex(1), Real(1) / 2, 24);
  const CMatrix phi_start = series_matrix(sols, Complex(Real(1) / 2), Real("1e-6"));
  const CMatrix phi_end = series_matrix(sols, Complex(Real(3) / 2), Real("1e-6"), Real(0));
  return inverse(phi_end) * transport(nod, p, digits) * phi_start;
}

// ---------------------------------------------------------------------------
// Physical sub-basis by exponent filtering

/// Conformal weight C(lambda) / (2 kappa) of the top of L(k, lambda).
inline Rational conformal_weight(const CartanData& cd, const Weight& lambda, const Rational& kappa) {
  return casimir_value(cd, lambda) / (2 * kappa);
}

/// Dominant weights mu with (mu, theta) <= k.
inline std::vector<Weight> admissible_weights(const CartanData& cd, const Rational& k) {
  std::vector<Weight> out;
  Weight mu(cd.rank, 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == cd.rank) {
      if (level_of(cd, mu) <= k) out.push_back(mu);
      return;
    }
    for (long a = 0;; ++a) {
      mu[i] = a;
      Weight probe(cd.rank, 0);
      probe[i] = a;
      if (level_of(cd, probe) > k) break;
      rec(i + 1);
    }
    mu[i] = 0;
  };
  rec(0);
  return out;
}

struct PhysicalBlocks {
  std::vector<std::size_t> admissible0, admissible1;  // indices into the Frobenius bases
  std::vector<std::size_t> log_excluded0, log_excluded1;
  std::vector<FrobeniusSolution> at0, at1;            // log-free solutions
  std::size_t dimension = 0;
  CMatrix coefficients0, coefficients1;               // intersection basis in each local basis (columns)
  std::vector<Rational> channel_exponents1;           // exponents at 1 present in the intersection
  Real residual;                                      // |Phi0 a - Phi1 b| at the sample points
};

/// Solutions whose exponents at 0 and at 1 all belong to admissible
/// intermediate weights, computed as an intersection of local solution spans
/// matched at z = 1/2. Frobenius solutions that would need a logarithm are
/// left out.
inline PhysicalBlocks physical_blocks(const AlgebraBasis& g, const FuchsianODE& ode, std::size_t order, unsigned digits) {
  const auto& cd = g.cartan;
  std::set<Rational> allowed0, allowed1;
  const Rational c1 = casimir_value(cd, ode.weights[1]), c2 = casimir_value(cd, ode.weights[2]), c3 = casimir_value(cd, ode.weights[3]);
  for (const auto& mu : admissible_weights(cd, ode.level)) {
    const Rational cm = casimir_value(cd, mu);
    allowed0.insert((cm - c2 - c3) / (2 * ode.kappa));
    allowed1.insert((cm - c1 - c2) / (2 * ode.kappa));
  }
  PhysicalBlocks pb;
  for (int base : {0, 1}) {
    const ExactEigen eig = exact_eigen(ode.local_residues(base).first);
    const auto& allowed = base == 0 ? allowed0 : allowed1;
    auto& keep = base == 0 ? pb.at0 : pb.at1;
    auto& excluded = base == 0 ? pb.log_excluded0 : pb.log_excluded1;
    for (std::size_t s = 0; s < ode.dimension(); ++s) {
      if (!allowed.count(eig.values[s] / ode.kappa)) continue;
      try {
        keep.push_back(frobenius_solution(ode, base, order, eig, s));
      } catch (const LogTermError&) {
        excluded.push_back(s);
      }
    }
  }
  const std::size_t n0 = pb.at0.size(), n1 = pb.at1.size(), d = ode.dimension();
  pb.residual = 0;
  if (n0 == 0 || n1 == 0) return pb;
  const Complex half(Real(1) / 2);
  const Real series_tol = Real("1e-6");
  const NumericODE nod = to_numeric(ode);
  const CMatrix v0 = local_basis_at(nod, pb.at0, half, digits, series_tol), v1 = local_basis_at(nod, pb.at1, half, digits, series_tol);
  // nullspace of [V0, -V1] by complete-pivot elimination
  CMatrix m(d, n0 + n1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < n0; ++j) m(i, j) = v0(i, j);
    for (std::size_t j = 0; j < n1; ++j) m(i, n0 + j) = -v1(i, j);
  }
  // the bases at 1/2 are accurate to roughly 4^{-order}; anything far above
  // that is a genuine pivot
  const Real tol = Real("1e-12");
  const std::size_t cols = n0 + n1;
  const Real scale = max_abs(m);
  std::vector<bool> col_is_pivot(cols, false);
  CMatrix work = m;
  std::vector<bool> row_used(d, false);
  std::vector<std::pair<std::size_t, std::size_t>> pivots;
  for (;;) {
    Real best = 0;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = 0; r < d; ++r)
      if (!row_used[r])
        for (std::size_t c = 0; c < cols; ++c)
          if (!col_is_pivot[c] && abs(work(r, c)) > best) {
            best = abs(work(r, c));
            br = r;
            bc = c;
          }
    if (best <= tol * scale) break;
    row_used[br] = true;
    col_is_pivot[bc] = true;
    pivots.emplace_back(br, bc);
    for (std::size_t r = 0; r < d; ++r) {
      if (r == br) continue;
      const Complex f = work(r, bc) / work(br, bc);
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols; ++c) work(r, c) -= f * work(br, c);
    }
  }
  std::vector<CVector> null_vectors;
  for (std::size_t free = 0; free < cols; ++free) {
    if (col_is_pivot[free]) continue;
    CVector x(cols);
    x[free] = Complex(1);
    for (const auto& [r, c] : pivots) x[c] = -work(r, free) / work(r, c);
    null_vectors.push_back(std::move(x));
  }
  pb.dimension = null_vectors.size();
  pb.coefficients0 = CMatrix(n0, pb.dimension);
  pb.coefficients1 = CMatrix(n1, pb.dimension);
  for (std::size_t k = 0; k < pb.dimension; ++k) {
    const Real nrm = max_abs(null_vectors[k]);
    for (std::size_t j = 0; j < n0; ++j) pb.coefficients0(j, k) = null_vectors[k][j] / Complex(nrm);
    for (std::size_t j = 0; j < n1; ++j) pb.coefficients1(j, k) = null_vectors[k][n0 + j] / Complex(nrm);
  }
  for (std::size_t j = 0; j < n1; ++j) {
    bool present = false;
    for (std::size_t k = 0; k < pb.dimension; ++k)
      if (abs(pb.coefficients1(j, k)) > tol) present = true;
    if (present) pb.channel_exponents1.push_back(pb.at1[j].exponent);
  }
  // agreement of the matched solutions at other points of the overlap
  if (pb.dimension > 0) {
    for (const char* zs : {"0.4", "0.6"}) {
      const Complex z{Real(zs)};
      Path p(half);
      p.line_to(z);
      const CMatrix lhs = integrate_path(nod, p, v0 * pb.coefficients0, digits);
      const CMatrix rhs = series_matrix(pb.at1, z, series_tol) * pb.coefficients1;
      pb.residual = std::max(pb.residual, max_abs(lhs - rhs));
    }
  }
  return pb;
}

struct FusionCheck {
  std::vector<Rational> channels;  // j3 values found
  std::size_t block_dimension = 0;
};

/// sl(2) fusion j1 x j2 at level k read off from the physical blocks of the
/// four-point system (j1, j1, j2, j2).
inline FusionCheck fusion_by_exponent_filter(const AlgebraBasis& g, const Rational& k, const Rational& j1, const Rational& j2,
                                             std::size_t order, unsigned digits) {
  if (g.cartan.rank != 1) throw std::invalid_argument("fusion_by_exponent_filter: sl(2) only");
  check_sl2_spin(k, j1, "j1");
  check_sl2_spin(k, j2, "j2");
  const Weight w1{Rational(2 * j1).get_num().get_si()}, w2{Rational(2 * j2).get_num().get_si()};
  const FuchsianODE ode = reduce_four_point(g, k, w1, w1, w2, w2);
  const PhysicalBlocks pb = physical_blocks(g, ode, order, digits);
  FusionCheck fc;
  fc.block_dimension = pb.dimension;
  const auto& cd = g.cartan;
  const Rational c1 = casimir_value(cd, w1), c2 = casimir_value(cd, w2);
  for (const auto& s : pb.channel_exponents1)
    for (long twice = 0; twice <= Rational(2 * k).get_num().get_si(); ++twice) {
      if ((casimir_value(cd, Weight{twice}) - c1 - c2) / (2 * ode.kappa) == s) fc.channels.push_back(make_rational(twice, 2));
    }
  std::sort(fc.channels.begin(), fc.channels.end());
  fc.channels.erase(std::unique(fc.channels.begin(), fc.channels.end()), fc.channels.end());
  return fc;
}

// ---------------------------------------------------------------------------
// Convergence and extension

struct ExtensionReport {
  long n = 0;                                       // the integer N
  std::vector<std::pair<Rational, Rational>> exponents;  // (r_i, s_i)
  Rational wt_sum;                                  // wt w_(1) + wt w_(2)
  bool status = false;
  bool logarithms = false;
  std::size_t blocks = 0;
  Real overlap_error;
};

/// For lowest-weight w_(1), w_(2): the s_i are the exponents at z = 1 of the
/// physical blocks, r_i = (h_0 - h_1 - h_2 - h_3) - s_i from homogeneity, and
/// N is the largest integer below every wt w_(1) + wt w_(2) + s_i.
inline ExtensionReport verify_extension_property(const AlgebraBasis& g, const FuchsianODE& ode, std::size_t order, unsigned digits) {
  const auto& cd = g.cartan;
  ExtensionReport rep;
  const PhysicalBlocks pb = physical_blocks(g, ode, order, digits);
  rep.blocks = pb.dimension;
  // an admissible exponent whose series needs a logarithm is reported
  rep.logarithms = !pb.log_excluded0.empty() || !pb.log_excluded1.empty();
  rep.overlap_error = pb.residual;
  if (pb.dimension == 0) throw ContinuationError("verify_extension_property: no physical blocks");
  std::vector<Rational> h;
  for (const auto& w : ode.weights) h.push_back(conformal_weight(cd, w, ode.kappa));
  const Rational delta = h[0] - h[1] - h[2] - h[3];
  rep.wt_sum = h[1] + h[2];
  std::optional<Rational> lowest;
  for (const auto& s : pb.channel_exponents1) {
    rep.exponents.emplace_back(delta - s, s);
    const Rational v = rep.wt_sum + s;
    if (!lowest || v < *lowest) lowest = v;
  }
  rep.n = ceil_of(*lowest).get_num().get_si() - 1;
  rep.status = true;
  for (const auto& [r, s] : rep.exponents)
    if (!(rep.wt_sum + s > rep.n)) rep.status = false;
  return rep;
}

// ---------------------------------------------------------------------------
// Associativity

struct AssociativityReport {
  Complex z;  // z2 / z1
  Real error;  // max |Phi0(z) - Phi1(z) C| relative
};

inline AssociativityReport verify_associativity(const FuchsianODE& ode, const Complex& z1, const Complex& z2, std::size_t order,
                                                unsigned digits) {
  const Real a1 = abs(z1), a2 = abs(z2), a12 = abs(z1 - z2);
  if (!(a1 > a2 && a2 > a12 && a12 > 0)) throw std::domain_error("verify_associativity: need |z1| > |z2| > |z1 - z2| > 0");
  const ConnectionMatrix cm = connection_matrix(ode, order, digits);
  const SolutionBases bases = solution_bases(ode, order);
  const NumericODE nod = to_numeric(ode);
  AssociativityReport rep;
  rep.z = z2 / z1;
  const Real series_tol = Real("1e-6");
  const CMatrix product_side = local_basis_at(nod, bases.at0, rep.z, digits, series_tol);
  const CMatrix iterate_side = series_matrix(bases.at1, rep.z, series_tol) * cm.matrix;
  rep.error = max_abs(product_side - iterate_side) / std::max(Real(1), max_abs(product_side));
  return rep;
}

// ---------------------------------------------------------------------------
// n-point iterated series

struct NPointSeries {
  std::size_t variables = 0;       // n - 1
  std::vector<Rational> exponents;  // e_m
  std::map<std::vector<long>, QVector> coefficients;  // multi-index -> carrier vector
  std::size_t order = 0;           // total degree
};

/// Joint eigenvectors of commuting diagonalizable rational matrices.
inline std::vector<std::pair<std::vector<Rational>, QVector>> joint_eigenvectors(const std::vector<QMatrix>& ops, std::size_t dim) {
  std::vector<std::pair<std::vector<Rational>, QMatrix>> spaces{{{}, QMatrix::identity(dim)}};
  for (const auto& op : ops) {
    std::vector<std::pair<std::vector<Rational>, QMatrix>> next;
    for (const auto& [vals, basis] : spaces) {
      const QMatrix restricted = restrict_to(QSparse::from_dense(op), basis);
      const ExactEigen eig = exact_eigen(restricted);
      std::map<Rational, std::vector<std::size_t>> groups;
      for (std::size_t i = 0; i < eig.values.size(); ++i) groups[eig.values[i]].push_back(i);
      for (const auto& [lam, idx] : groups) {
        QMatrix sub(basis.rows(), idx.size());
        for (std::size_t c = 0; c < idx.size(); ++c) sub.set_column(c, basis * eig.vectors.column(idx[c]));
        auto v = vals;
        v.push_back(lam);
        next.emplace_back(std::move(v), std::move(sub));
      }
    }
    spaces = std::move(next);
  }
  std::vector<std::pair<std::vector<Rational>, QVector>> out;
  for (const auto& [vals, basis] : spaces)
    for (std::size_t c = 0; c < basis.cols(); ++c) out.emplace_back(vals, basis.column(c));
  return out;
}

/// The system for <w0', Y(w1, x1) ... Y(wn, xn) w_{n+1}> with x_{n+1} = 0 in
/// the variables u_m = x_{m+1} / x_m. With U_pl = u_p ... u_{l-1},
///   kappa u_m d/du_m F = [ sum_{m < l < p} Omega_lp - sum_{p <= m < l} Omega_pl U_pl / (1 - U_pl) ] F.
struct NPointSystem {
  Rational kappa;
  std::size_t n = 0;  // insertion points x_1 .. x_n
  QMatrix carrier;
  std::vector<std::vector<QMatrix>> omega;  // restricted, slots 0 .. n+1
  std::vector<QMatrix> constant_parts;       // K_m, m = 1 .. n-1
};

inline NPointSystem npoint_system(const AlgebraBasis& g, const Rational& k, const std::vector<Weight>& weights) {
  if (weights.size() < 3) throw std::invalid_argument("npoint_system: need weights for infinity, the insertions and 0");
  NPointSystem sys;
  sys.kappa = k + g.cartan.dual_coxeter;
  if (sys.kappa == 0) throw std::invalid_argument("npoint_system: level equals minus the dual Coxeter number");
  sys.n = weights.size() - 2;
  std::vector<Irrep> factors{dualize(g, build_irrep(g, weights[0]))};
  for (std::size_t i = 1; i < weights.size(); ++i) factors.push_back(build_irrep(g, weights[i]));
  TensorSpace ts(g, factors);
  sys.carrier = invariant_subspace(ts).basis;
  if (sys.carrier.cols() == 0) throw std::runtime_error("npoint_system: empty invariant subspace, no blocks exist");
  const std::size_t slots = weights.size();
  sys.omega.assign(slots, std::vector<QMatrix>(slots));
  for (std::size_t l = 1; l < slots; ++l)
    for (std::size_t p = l + 1; p < slots; ++p) {
      sys.omega[l][p] = restrict_to(omega(ts, l, p).matrix, sys.carrier);
      sys.omega[p][l] = sys.omega[l][p];
    }
  const std::size_t d = sys.carrier.cols();
  for (std::size_t m = 1; m < sys.n; ++m) {
    QMatrix km(d, d);
    for (std::size_t l = m + 1; l < slots; ++l)
      for (std::size_t p = l + 1; p < slots; ++p) km += sys.omega[l][p];
    sys.constant_parts.push_back(std::move(km));
  }
  return sys;
}

/// Series solutions F = prod u_m^{e_m} sum_alpha c_alpha u^alpha through total
/// degree `order`, one per joint eigenvector of the K_m.
inline std::vector<NPointSeries> npoint_series(const NPointSystem& sys, std::size_t order) {
  const std::size_t nv = sys.n - 1, d = sys.carrier.cols();
  if (nv == 0) throw std::invalid_argument("npoint_series: need at least two insertion points");
  std::vector<NPointSeries> out;
  for (const auto& [vals, vec] : joint_eigenvectors(sys.constant_parts, d)) {
    NPointSeries s;
    s.variables = nv;
    s.order = order;
    for (const auto& v : vals) s.exponents.push_back(v / sys.kappa);
    s.coefficients[std::vector<long>(nv, 0)] = vec;
    // multi-indices by total degree
    for (std::size_t deg = 1; deg <= order; ++deg) {
      std::vector<std::vector<long>> indices;
      std::vector<long> a(nv, 0);
      std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
        if (i + 1 == nv) {
          a[i] = left;
          indices.push_back(a);
          return;
        }
        for (long x = left; x >= 0; --x) {
          a[i] = x;
          rec(i + 1, left - x);
        }
      };
      rec(0, static_cast<long>(deg));
      for (const auto& alpha : indices) {
        // stacked equations over m
        QMatrix system(nv * d, d + 1);
        for (std::size_t m = 1; m <= nv; ++m) {
          const QMatrix& km = sys.constant_parts[m - 1];
          QVector rhs(d, Rational(0));
          for (std::size_t p = 1; p <= m; ++p)
            for (std::size_t l = m + 1; l <= sys.n; ++l) {
              // U_pl^t shifts alpha_i, i = p .. l-1 (1-based u indices) by t
              for (long t = 1;; ++t) {
                std::vector<long> beta = alpha;
                bool ok = true;
                for (std::size_t i = p; i < l; ++i) {
                  beta[i - 1] -= t;
                  if (beta[i - 1] < 0) ok = false;
                }
                if (!ok) break;
                auto it = s.coefficients.find(beta);
                if (it == s.coefficients.end()) continue;
                const QVector contrib = sys.omega[p][l] * it->second;
                for (std::size_t i = 0; i < d; ++i) rhs[i] -= contrib[i];
              }
            }
          for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = 0; c < d; ++c) system((m - 1) * d + r, c) = -km(r, c);
            system((m - 1) * d + r, r) += sys.kappa * (s.exponents[m - 1] + alpha[m - 1]);
            system((m - 1) * d + r, d) = rhs[r];
          }
        }
        QMatrix rr = system;
        const auto piv = row_reduce(rr);
        if (!piv.empty() && piv.back() == d) throw LogTermError("npoint_series: inconsistent recursion, logarithmic terms required");
        QVector c(d, Rational(0));
        for (std::size_t k = 0; k < piv.size(); ++k) c[piv[k]] = rr(k, d);
        if (!is_zero(c)) s.coefficients[alpha] = std::move(c);
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct NPointReport {
  std::vector<Complex> u;
  std::vector<CVector> values;         // per solution, at the base order
  std::vector<Real> tail_ratios;       // per solution
  Real max_tail_ratio;
  Real doubling_difference;            // max |F_M - F_{2M}| / max(1, |F_2M|)
  std::size_t order = 0;
  bool convergent = false;             // tail ratio < 1
};

inline CVector evaluate_npoint(const NPointSeries& s, const std::vector<Complex>& u, std::vector<Real>* shells = nullptr) {
  const std::size_t d = s.coefficients.begin()->second.size();
  CVector acc(d);
  if (shells) shells->assign(s.order + 1, Real(0));
  for (const auto& [alpha, c] : s.coefficients) {
    Complex mono(1);
    long deg = 0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (long t = 0; t < alpha[i]; ++t) mono *= u[i];
      deg += alpha[i];
    }
    Real cn = 0;
    for (std::size_t i = 0; i < d; ++i) {
      if (c[i] == 0) continue;
      acc[i] += Complex(c[i]) * mono;
      cn = std::max(cn, abs(to_real(c[i])));
    }
    if (shells) (*shells)[static_cast<std::size_t>(deg)] += cn * abs(mono);
  }
  Complex pre(1);
  for (std::size_t i = 0; i < u.size(); ++i) pre *= pow(u[i], s.exponents[i]);
  for (auto& x : acc) x *= pre;
  return acc;
}

/// Geometric ratio fitted to the last shells: (S_M / S_{M-w})^{1/w}.
inline Real shell_ratio(const std::vector<Real>& shells) {
  const std::size_t m = shells.size() - 1;
  const std::size_t w = std::max<std::size_t>(1, std::min<std::size_t>(10, m / 2));
  for (std::size_t top = m; top >= w; --top) {
    if (shells[top - w] > 0 && shells[top] > 0) return boost::multiprecision::pow(shells[top] / shells[top - w], Real(1) / Real(static_cast<unsigned>(w)));
    if (top == w) break;
  }
  return Real(0);
}

/// Iterated-series evaluation at points with |x_1| > ... > |x_n| > 0.
inline NPointReport verify_n_point(const NPointSystem& sys, const std::vector<Complex>& points, std::size_t order, unsigned digits) {
  (void)digits;
  if (points.size() != sys.n) throw std::invalid_argument("verify_n_point: wrong number of points");
  for (std::size_t i = 0; i + 1 < points.size(); ++i)
    if (!(abs(points[i]) > abs(points[i + 1])) || abs(points[i + 1]) == 0)
      throw std::domain_error("verify_n_point: points must satisfy |x1| > ... > |xn| > 0");
  NPointReport rep;
  rep.order = order;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) rep.u.push_back(points[i + 1] / points[i]);
  const auto base = npoint_series(sys, order);
  const auto doubled = npoint_series(sys, 2 * order);
  rep.max_tail_ratio = 0;
  rep.doubling_difference = 0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    std::vector<Real> shells;
    CVector v = evaluate_npoint(base[k], rep.u, &shells);
    const CVector v2 = evaluate_npoint(doubled[k], rep.u);
    const Real q = shell_ratio(shells);
    rep.tail_ratios.push_back(q);
    rep.max_tail_ratio = std::max(rep.max_tail_ratio, q);
    Real diff = 0;
    for (std::size_t i = 0; i < v.size(); ++i) diff = std::max(diff, abs(v[i] - v2[i]));
    rep.doubling_difference = std::max(rep.doubling_difference, diff / std::max(Real(1), max_abs(v2)));
    rep.values.push_back(std::move(v));
  }
  rep.convergent = rep.max_tail_ratio < 1;
  return rep;
}

}  // namespace wznw

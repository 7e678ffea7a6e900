#pragma once

// Multiprecision complex scalars and small dense complex linear algebra.

#include <boost/multiprecision/mpfr.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wznw/exact.hpp"

namespace wznw {

using Real = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>, boost::multiprecision::et_off>;

/// Sets the default MPFR precision (decimal digits) for newly created values.
/// Restores the previous value on destruction. The default is process-wide,
/// so set it before starting worker threads.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits) : saved_(Real::default_precision()) { Real::default_precision(digits); }
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

inline Real to_real(const Rational& q) {
  Real n(q.get_num().get_str()), d(q.get_den().get_str());
  return n / d;
}

inline Real pi_real() {
  Real x;
  mpfr_const_pi(x.backend().data(), MPFR_RNDN);
  return x;
}

struct Complex {
  Real re, im;
  Complex() : re(0), im(0) {}
  Complex(int x) : re(x), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(const Rational& q) : re(to_real(q)), im(0) {}  // NOLINT(google-explicit-constructor)

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    Real r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = std::move(r);
    return *this;
  }
  Complex& operator/=(const Complex& o) {
    const Real den = o.re * o.re + o.im * o.im;
    if (den == 0) throw std::domain_error("Complex: division by zero");
    Real r = (re * o.re + im * o.im) / den;
    im = (im * o.re - re * o.im) / den;
    re = std::move(r);
    return *this;
  }
  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

inline Real abs(const Complex& z) { return boost::multiprecision::hypot(z.re, z.im); }
inline Real arg(const Complex& z) { return boost::multiprecision::atan2(z.im, z.re); }
inline Complex conj(const Complex& z) { return Complex(z.re, -z.im); }

inline Complex exp(const Complex& z) {
  const Real m = boost::multiprecision::exp(z.re);
  return Complex(m * boost::multiprecision::cos(z.im), m * boost::multiprecision::sin(z.im));
}

/// Principal branch, argument in (-pi, pi].
inline Complex log(const Complex& z) {
  if (z.re == 0 && z.im == 0) throw std::domain_error("Complex: log of zero");
  return Complex(boost::multiprecision::log(abs(z)), arg(z));
}

/// z^r on the principal branch.
inline Complex pow(const Complex& z, const Rational& r) {
  if (r == 0) return Complex(1);
  return exp(Complex(to_real(r)) * log(z));
}

/// e^{2 pi i r}
inline Complex phase(const Rational& r) { return exp(Complex(Real(0), 2 * pi_real() * to_real(r))); }

inline std::string to_string(const Real& x, unsigned digits) {
  return x.str(static_cast<std::streamsize>(digits), std::ios_base::scientific);
}

using CMatrix = DenseMatrix<Complex>;
using CVector = std::vector<Complex>;

inline CMatrix to_complex(const QMatrix& m) {
  CMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = Complex(m(i, j));
  return c;
}

inline CVector to_complex(const QVector& v) {
  CVector c;
  c.reserve(v.size());
  for (const auto& x : v) c.emplace_back(x);
  return c;
}

inline Real max_abs(const CMatrix& m) {
  Real best = 0;
  for (const auto& x : m.data()) best = std::max(best, abs(x));
  return best;
}

inline Real max_abs(const CVector& v) {
  Real best = 0;
  for (const auto& x : v) best = std::max(best, abs(x));
  return best;
}

/// Infinity norm (max row sum).
inline Real norm_inf(const CMatrix& m) {
  Real best = 0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Real s = 0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

struct LUDecomposition {
  CMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
};

/// Partial-pivoting LU; throws domain_error on an exactly zero pivot.
inline LUDecomposition lu_decompose(const CMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw std::invalid_argument("lu_decompose: matrix not square");
  LUDecomposition d{a, {}, 1};
  d.perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.perm[i] = i;
  CMatrix& m = d.lu;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    Real best = abs(m(c, c));
    for (std::size_t r = c + 1; r < n; ++r)
      if (abs(m(r, c)) > best) {
        best = abs(m(r, c));
        piv = r;
      }
    if (best == 0) throw std::domain_error("lu_decompose: singular matrix");
    if (piv != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
      std::swap(d.perm[c], d.perm[piv]);
      d.sign = -d.sign;
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      m(r, c) /= m(c, c);
      if (m(r, c) == 0) continue;
      for (std::size_t j = c + 1; j < n; ++j) m(r, j) -= m(r, c) * m(c, j);
    }
  }
  return d;
}

inline Complex determinant(const CMatrix& a) {
  if (a.rows() == 0) return Complex(1);
  LUDecomposition d;
  try {
    d = lu_decompose(a);
  } catch (const std::domain_error&) {
    return Complex(0);
  }
  Complex det(d.sign);
  for (std::size_t i = 0; i < a.rows(); ++i) det *= d.lu(i, i);
  return det;
}

inline CMatrix inverse(const CMatrix& a) {
  const std::size_t n = a.rows();
  const LUDecomposition d = lu_decompose(a);
  CMatrix inv(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    CVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
      Complex s = (d.perm[i] == col) ? Complex(1) : Complex(0);
      for (std::size_t j = 0; j < i; ++j) s -= d.lu(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      Complex s = x[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= d.lu(ii, j) * x[j];
      x[ii] = s / d.lu(ii, ii);
    }
    inv.set_column(col, x);
  }
  return inv;
}

/// Condition number in the infinity norm.
inline Real condition_number(const CMatrix& a) { return norm_inf(a) * norm_inf(inverse(a)); }

/// Numerical rank by complete-pivoting elimination; pivots below
/// tol * (largest entry) count as zero.
inline std::size_t numerical_rank(CMatrix m, const Real& tol) {
  const Real scale = max_abs(m);
  if (scale == 0) return 0;
  std::size_t rank = 0;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::vector<bool> row_used(rows, false), col_used(cols, false);
  for (;;) {
    Real best = 0;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = 0; r < rows; ++r)
      if (!row_used[r])
        for (std::size_t c = 0; c < cols; ++c)
          if (!col_used[c] && abs(m(r, c)) > best) {
            best = abs(m(r, c));
            br = r;
            bc = c;
          }
    if (best <= tol * scale) break;
    ++rank;
    row_used[br] = col_used[bc] = true;
    for (std::size_t r = 0; r < rows; ++r) {
      if (row_used[r]) continue;
      const Complex f = m(r, bc) / m(br, bc);
      for (std::size_t c = 0; c < cols; ++c) m(r, c) -= f * m(br, c);
    }
  }
  return rank;
}

inline Real epsilon_for(unsigned digits) { return boost::multiprecision::pow(Real(10), -static_cast<int>(digits)); }

}  // namespace wznw

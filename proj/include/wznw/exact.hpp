#pragma once

// Exact rational scalars and dense/sparse matrices with the linear algebra the
// rest of the library needs (row reduction, kernels, inverses, solves).

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wznw {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

/// Parses "p", "p/q" or "-p/q".
inline Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("not a rational number: '" + text + "'");
  if (q.get_den() == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Rational floor_of(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

inline Rational ceil_of(const Rational& q) {
  mpz_class c;
  mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(c);
}

/// Binomial coefficient C(n, k) for n >= 0.
inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw std::invalid_argument("DenseMatrix: data size mismatch");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }
  void set_column(std::size_t c, const std::vector<T>& v) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
  }
  std::vector<T> row(std::size_t r) const {
    return std::vector<T>(data_.begin() + r * cols_, data_.begin() + (r + 1) * cols_);
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == 0; });
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& o) {
    check_same(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  DenseMatrix& operator*=(const T& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
  friend DenseMatrix operator*(DenseMatrix a, const T& s) { return a *= s; }
  friend DenseMatrix operator*(const T& s, DenseMatrix a) { return a *= s; }
  friend DenseMatrix operator-(DenseMatrix a) {
    for (auto& x : a.data_) x = -x;
    return a;
  }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("DenseMatrix: product shape mismatch");
    DenseMatrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend std::vector<T> operator*(const DenseMatrix& a, const std::vector<T>& v) {
    if (a.cols_ != v.size()) throw std::invalid_argument("DenseMatrix: vector shape mismatch");
    std::vector<T> out(a.rows_, T(0));
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k)
        if (v[k] != 0) out[i] += a(i, k) * v[k];
    return out;
  }

  friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  void check_same(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("DenseMatrix: shape mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using QMatrix = DenseMatrix<Rational>;
using QVector = std::vector<Rational>;

template <class T>
DenseMatrix<T> commutator(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  return a * b - b * a;
}

/// Kronecker product a ⊗ b.
template <class T>
DenseMatrix<T> kron(const DenseMatrix<T>& a, const DenseMatrix<T>& b) {
  DenseMatrix<T> k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0) continue;
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q) k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
    }
  return k;
}

inline Rational dot(const QVector& a, const QVector& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool is_zero(const QVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

/// Reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> row_reduce(QMatrix& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    if (p != r)
      for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    const Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      const Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(QMatrix m) { return row_reduce(m).size(); }

/// Basis of {x : m x = 0}, returned as the columns of a matrix.
inline QMatrix nullspace(QMatrix m) {
  const auto pivots = row_reduce(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  QMatrix basis(m.cols(), free_cols.size());
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    basis(free_cols[k], k) = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) basis(pivots[i], k) = -m(i, free_cols[k]);
  }
  return basis;
}

/// Stacks matrices vertically (all must have the same column count).
inline QMatrix vstack(const std::vector<QMatrix>& blocks) {
  if (blocks.empty()) return {};
  std::size_t rows = 0;
  const std::size_t cols = blocks.front().cols();
  for (const auto& b : blocks) {
    if (b.cols() != cols) throw std::invalid_argument("vstack: column mismatch");
    rows += b.rows();
  }
  QMatrix out(rows, cols);
  std::size_t r0 = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < cols; ++j) out(r0 + i, j) = b(i, j);
    r0 += b.rows();
  }
  return out;
}

inline QMatrix inverse(const QMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  QMatrix aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) throw std::domain_error("inverse: matrix is singular");
  QMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Solves a x = b for square nonsingular a.
inline QVector solve(const QMatrix& a, const QVector& b) {
  const std::size_t n = a.rows();
  QMatrix aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() < n || pivots[n - 1] != n - 1) throw std::domain_error("solve: matrix is singular");
  QVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

/// Coordinates of the columns of `target` in the column basis `basis`
/// (basis must have full column rank and span every target column).
inline QMatrix coordinates_in(const QMatrix& basis, const QMatrix& target) {
  const std::size_t n = basis.rows(), k = basis.cols();
  QMatrix aug(n, k + target.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) aug(i, j) = basis(i, j);
    for (std::size_t j = 0; j < target.cols(); ++j) aug(i, k + j) = target(i, j);
  }
  const auto pivots = row_reduce(aug);
  if (pivots.size() > k || (k > 0 && pivots.size() < k) || (!pivots.empty() && pivots.back() >= k))
    throw std::domain_error("coordinates_in: target not in the span of the basis");
  QMatrix coords(k, target.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < target.cols(); ++j) coords(i, j) = aug(i, k + j);
  return coords;
}

/// Row-sparse matrix, used for operators on tensor products.
template <class T>
class SparseMatrix {
 public:
  using Row = std::vector<std::pair<std::size_t, T>>;

  SparseMatrix() = default;
  SparseMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows) {}

  static SparseMatrix from_dense(const DenseMatrix<T>& d) {
    SparseMatrix s(d.rows(), d.cols());
    for (std::size_t i = 0; i < d.rows(); ++i)
      for (std::size_t j = 0; j < d.cols(); ++j)
        if (d(i, j) != 0) s.rows_[i].emplace_back(j, d(i, j));
    return s;
  }

  static SparseMatrix identity(std::size_t n) {
    SparseMatrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) s.rows_[i].emplace_back(i, T(1));
    return s;
  }

  std::size_t rows() const { return rows_.size(); }
  std::size_t cols() const { return cols_; }
  const Row& row(std::size_t i) const { return rows_[i]; }

  std::size_t nonzeros() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
  }

  bool is_zero() const {
    for (const auto& r : rows_)
      for (const auto& [c, v] : r)
        if (v != 0) return false;
    return true;
  }

  DenseMatrix<T> to_dense() const {
    DenseMatrix<T> d(rows(), cols_);
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [c, v] : rows_[i]) d(i, c) += v;
    return d;
  }

  SparseMatrix transpose() const {
    SparseMatrix t(cols_, rows());
    for (std::size_t i = 0; i < rows(); ++i)
      for (const auto& [c, v] : rows_[i]) t.rows_[c].emplace_back(i, v);
    return t;
  }

  friend SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols_ != b.rows()) throw std::invalid_argument("SparseMatrix: product shape mismatch");
    SparseMatrix c(a.rows(), b.cols_);
    std::vector<T> acc(b.cols_, T(0));
    std::vector<char> touched(b.cols_, 0);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      cols.clear();
      for (const auto& [k, av] : a.rows_[i])
        for (const auto& [j, bv] : b.rows_[k]) {
          if (!touched[j]) {
            touched[j] = 1;
            cols.push_back(j);
          }
          acc[j] += av * bv;
        }
      std::sort(cols.begin(), cols.end());
      for (auto j : cols) {
        if (acc[j] != 0) c.rows_[i].emplace_back(j, acc[j]);
        acc[j] = 0;
        touched[j] = 0;
      }
    }
    return c;
  }

  friend SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, T(1)); }
  friend SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) { return combine(a, b, T(-1)); }

  friend SparseMatrix operator*(const T& s, const SparseMatrix& a) {
    SparseMatrix c(a.rows(), a.cols_);
    if (s == 0) return c;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (const auto& [j, v] : a.rows_[i]) c.rows_[i].emplace_back(j, s * v);
    return c;
  }

  friend bool operator==(const SparseMatrix& a, const SparseMatrix& b) { return (a - b).is_zero(); }

  /// Kronecker product.
  friend SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix k(a.rows() * b.rows(), a.cols_ * b.cols_);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t p = 0; p < b.rows(); ++p) {
        auto& row = k.rows_[i * b.rows() + p];
        for (const auto& [j, av] : a.rows_[i])
          for (const auto& [q, bv] : b.rows_[p]) row.emplace_back(j * b.cols_ + q, av * bv);
      }
    return k;
  }

 private:
  static SparseMatrix combine(const SparseMatrix& a, const SparseMatrix& b, const T& sign) {
    if (a.rows() != b.rows() || a.cols_ != b.cols_) throw std::invalid_argument("SparseMatrix: shape mismatch");
    SparseMatrix c(a.rows(), a.cols_);
    for (std::size_t i = 0; i < a.rows(); ++i) {
      std::map<std::size_t, T> acc;
      for (const auto& [j, v] : a.rows_[i]) acc[j] += v;
      for (const auto& [j, v] : b.rows_[i]) acc[j] += sign * v;
      for (auto& [j, v] : acc)
        if (v != 0) c.rows_[i].emplace_back(j, v);
    }
    return c;
  }

  std::size_t cols_ = 0;
  std::vector<Row> rows_;

 public:
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<Row> data) : cols_(cols), rows_(std::move(data)) {
    if (rows_.size() != rows) throw std::invalid_argument("SparseMatrix: row count mismatch");
  }
};

using QSparse = SparseMatrix<Rational>;

inline std::string format_matrix(const QMatrix& m) {
  std::ostringstream os;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    os << "[";
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j).get_str();
    os << "]\n";
  }
  return os.str();
}

}  // namespace wznw

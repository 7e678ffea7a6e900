#include <gtest/gtest.h>

#include <random>

#include "wznw/exact.hpp"

using namespace wznw;

namespace {

QMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int lo = -3, int hi = 3) {
  std::uniform_int_distribution<int> d(lo, hi);
  QMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

// cofactor expansion, only for tiny matrices
Rational det_by_cofactors(const QMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  Rational s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    QMatrix minor(n - 1, n - 1);
    for (std::size_t r = 1; r < n; ++r)
      for (std::size_t c = 0, cc = 0; c < n; ++c)
        if (c != j) minor(r - 1, cc++) = m(r, c);
    s += ((j % 2) ? -1 : 1) * m(0, j) * det_by_cofactors(minor);
  }
  return s;
}

// rank as the largest k with a nonzero k x k minor
std::size_t rank_by_minors(const QMatrix& m) {
  const std::size_t r = m.rows(), c = m.cols();
  for (std::size_t k = std::min(r, c); k > 0; --k) {
    std::vector<bool> rs(r, false), cs(c, false);
    std::fill(rs.begin(), rs.begin() + k, true);
    do {
      std::fill(cs.begin(), cs.end(), false);
      std::fill(cs.begin(), cs.begin() + k, true);
      do {
        QMatrix sub(k, k);
        for (std::size_t i = 0, a = 0; i < r; ++i) {
          if (!rs[i]) continue;
          for (std::size_t j = 0, b = 0; j < c; ++j)
            if (cs[j]) sub(a, b++) = m(i, j);
          ++a;
        }
        if (det_by_cofactors(sub) != 0) return k;
      } while (std::prev_permutation(cs.begin(), cs.end()));
    } while (std::prev_permutation(rs.begin(), rs.end()));
  }
  return 0;
}

}  // namespace

TEST(Rational, CanonicalAndParsing) {
  EXPECT_EQ(make_rational(4, 2), Rational(2));
  EXPECT_EQ(make_rational(-6, 4).get_str(), "-3/2");
  EXPECT_EQ(parse_rational("3/6"), make_rational(1, 2));
  EXPECT_THROW(parse_rational("x"), std::invalid_argument);
  EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
  EXPECT_EQ(floor_of(make_rational(-1, 2)), Rational(-1));
  EXPECT_EQ(ceil_of(make_rational(-1, 2)), Rational(0));
  EXPECT_EQ(ceil_of(Rational(3)), Rational(3));
  EXPECT_TRUE(is_integer(make_rational(8, 4)));
}

TEST(Rational, BinomialMatchesPascal) {
  std::vector<std::vector<mpz_class>> p(20);
  for (std::size_t n = 0; n < 20; ++n) {
    p[n].assign(n + 1, 1);
    for (std::size_t k = 1; k < n; ++k) p[n][k] = p[n - 1][k - 1] + p[n - 1][k];
    for (std::size_t k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), p[n][k]);
  }
}

TEST(DenseLinearAlgebra, RankMatchesMinors) {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t r = 1 + rng() % 4, c = 1 + rng() % 4;
    const QMatrix m = random_matrix(rng, r, c, -1, 1);
    EXPECT_EQ(rank(m), rank_by_minors(m));
  }
}

TEST(DenseLinearAlgebra, NullspaceProperties) {
  std::mt19937 rng(12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t r = 1 + rng() % 5, c = 1 + rng() % 6;
    const QMatrix m = random_matrix(rng, r, c, -2, 2);
    const QMatrix ns = nullspace(m);
    EXPECT_EQ(rank(m) + ns.cols(), c);
    EXPECT_TRUE((m * ns).is_zero());
    if (ns.cols()) EXPECT_EQ(rank(ns), ns.cols());
  }
}

TEST(DenseLinearAlgebra, InverseAndSolve) {
  std::mt19937 rng(13);
  int invertible = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    const QMatrix a = random_matrix(rng, n, n);
    if (det_by_cofactors(a) == 0) {
      EXPECT_THROW(inverse(a), std::domain_error);
      continue;
    }
    ++invertible;
    const QMatrix inv = inverse(a);
    EXPECT_EQ(a * inv, QMatrix::identity(n));
    EXPECT_EQ(inv * a, QMatrix::identity(n));
    QVector b(n);
    for (auto& x : b) x = static_cast<int>(rng() % 7) - 3;
    EXPECT_EQ(a * solve(a, b), b);
  }
  EXPECT_GT(invertible, 10);
}

TEST(DenseLinearAlgebra, CoordinatesInBasis) {
  std::mt19937 rng(14);
  const QMatrix basis = random_matrix(rng, 6, 3);
  ASSERT_EQ(rank(basis), 3u);
  const QMatrix coeffs = random_matrix(rng, 3, 2);
  EXPECT_EQ(coordinates_in(basis, basis * coeffs), coeffs);
}

TEST(SparseMatrix, AgreesWithDense) {
  std::mt19937 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const QMatrix a = random_matrix(rng, 4, 3, -1, 1), b = random_matrix(rng, 3, 5, -1, 1);
    const QSparse sa = QSparse::from_dense(a), sb = QSparse::from_dense(b);
    EXPECT_EQ((sa * sb).to_dense(), a * b);
    EXPECT_EQ(sa.transpose().to_dense(), a.transpose());
    EXPECT_EQ((sa - sa).is_zero(), true);
    EXPECT_EQ((make_rational(2, 3) * sa).to_dense(), make_rational(2, 3) * a);
  }
}

TEST(SparseMatrix, KroneckerMixedProduct) {
  std::mt19937 rng(16);
  const QSparse a = QSparse::from_dense(random_matrix(rng, 2, 2)), b = QSparse::from_dense(random_matrix(rng, 3, 3));
  const QSparse c = QSparse::from_dense(random_matrix(rng, 2, 2)), d = QSparse::from_dense(random_matrix(rng, 3, 3));
  EXPECT_EQ((kron(a, b) * kron(c, d)).to_dense(), kron(a * c, b * d).to_dense());
}

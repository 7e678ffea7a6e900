#include <gtest/gtest.h>

#include <random>

#include "wznw/liealg.hpp"

using namespace wznw;

namespace {

struct Classical {
  std::string label;
  std::size_t positive_roots;
  long dual_coxeter;
};

// textbook tables
const std::vector<Classical> kTable{
    {"A1", 1, 2},  {"A2", 3, 3},  {"A3", 6, 4},  {"A4", 10, 5}, {"B2", 4, 3}, {"B3", 9, 5},
    {"C3", 9, 4},  {"D4", 12, 6}, {"D5", 20, 8}, {"G2", 6, 4},
};

}  // namespace

TEST(CartanData, RootCountsAndDualCoxeter) {
  for (const auto& c : kTable) {
    SCOPED_TRACE(c.label);
    const auto cd = build_cartan_data(c.label);
    EXPECT_EQ(cd.positive_roots.size(), c.positive_roots);
    EXPECT_EQ(cd.dual_coxeter, c.dual_coxeter);
    EXPECT_EQ(dual_coxeter_from_marks(cd), c.dual_coxeter);
    const auto tw = cd.root_to_weight(cd.theta);
    EXPECT_EQ(cd.form(tw, tw), Rational(2));
  }
}

TEST(CartanData, HighestRootIsHighest) {
  for (const auto& c : kTable) {
    const auto cd = build_cartan_data(c.label);
    for (const auto& r : cd.positive_roots)
      for (std::size_t i = 0; i < cd.rank; ++i) EXPECT_LE(r[i], cd.theta[i]) << c.label;
  }
}

TEST(CartanData, LabelValidation) {
  EXPECT_NO_THROW(build_cartan_data("A_2"));
  EXPECT_THROW(build_cartan_data("E6"), std::invalid_argument);
  EXPECT_THROW(build_cartan_data("F4"), std::invalid_argument);
  EXPECT_THROW(build_cartan_data("A0"), std::invalid_argument);
  EXPECT_THROW(build_cartan_data("sl2"), std::invalid_argument);
  EXPECT_THROW(build_algebra_basis(build_cartan_data("B2")), std::invalid_argument);
}

class TypeA : public ::testing::TestWithParam<std::string> {};

TEST_P(TypeA, DimensionAndJacobi) {
  const auto cd = build_cartan_data(GetParam());
  const auto g = build_algebra_basis(cd);
  const std::size_t n = cd.rank + 1;
  EXPECT_EQ(g.dimension, n * n - 1);
  std::mt19937 rng(3);
  for (int t = 0; t < 200; ++t) EXPECT_TRUE(jacobi_holds(g, rng() % g.dimension, rng() % g.dimension, rng() % g.dimension));
}

TEST_P(TypeA, FormInvariantAndKillingProportional) {
  const auto cd = build_cartan_data(GetParam());
  const auto g = build_algebra_basis(cd);
  const std::size_t dim = g.dimension;
  // Killing form from the structure constants: tr(ad x_a ad x_b)
  std::vector<QMatrix> ad(dim, QMatrix(dim, dim));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      for (std::size_t c = 0; c < dim; ++c) ad[a](c, b) = g.bracket[a][b][c];
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b) {
      const QMatrix p = ad[a] * ad[b];
      Rational tr = 0;
      for (std::size_t i = 0; i < dim; ++i) tr += p(i, i);
      EXPECT_EQ(tr, 2 * cd.dual_coxeter * g.gram(a, b));
    }
  std::mt19937 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto x = g.unit(rng() % dim), y = g.unit(rng() % dim), z = g.unit(rng() % dim);
    EXPECT_EQ(g.form(g.bracket_vec(x, y), z), g.form(x, g.bracket_vec(y, z)));
  }
}

TEST_P(TypeA, ChevalleyRelations) {
  const auto cd = build_cartan_data(GetParam());
  const auto g = build_algebra_basis(cd);
  for (std::size_t i = 0; i < cd.rank; ++i)
    for (std::size_t j = 0; j < cd.rank; ++j) {
      // [h_i, e_j] = A_ji e_j and [e_i, f_j] = delta_ij h_i
      QVector he = g.bracket[g.h[i]][g.e[j]];
      QVector expect = g.unit(g.e[j]);
      for (auto& x : expect) x *= cd.cartan_matrix[j][i];
      EXPECT_EQ(he, expect);
      QVector ef = g.bracket[g.e[i]][g.f[j]];
      EXPECT_EQ(ef, i == j ? g.unit(g.h[i]) : QVector(g.dimension, Rational(0)));
    }
}

TEST_P(TypeA, CasimirCommutesWithAction) {
  const auto g = build_algebra_basis(build_cartan_data(GetParam()));
  const std::size_t n = g.matrices[0].rows();
  QMatrix cas(n, n);
  for (const auto& [a, b, c] : g.casimir_terms()) cas += c * (g.matrices[a] * g.matrices[b]);
  for (const auto& m : g.matrices) EXPECT_EQ(cas * m, m * cas);
  // scalar C(omega_1) on the defining representation
  const Rational expect = make_rational(static_cast<long>(n * n - 1), static_cast<long>(n));
  EXPECT_EQ(cas, expect * QMatrix::identity(n));
}

INSTANTIATE_TEST_SUITE_P(Small, TypeA, ::testing::Values("A1", "A2", "A3"));

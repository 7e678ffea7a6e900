#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "wznw/kz.hpp"

using namespace wznw;

namespace {

const AlgebraBasis& sl2() {
  static const AlgebraBasis g = build_algebra_basis(build_cartan_data("A1"));
  return g;
}
const AlgebraBasis& sl3() {
  static const AlgebraBasis g = build_algebra_basis(build_cartan_data("A2"));
  return g;
}

Rational general_binomial(const Rational& beta, std::size_t m) {
  Rational r = 1;
  for (std::size_t i = 0; i < m; ++i) r = r * (beta - static_cast<long>(i)) / static_cast<long>(i + 1);
  return r;
}

// Omega eigenvalues on L(a) (x) L(b) channels that also occur in L(c) (x) L(d)
// (sl(2), Dynkin labels), each channel counted once
std::vector<Rational> channel_exponents(long a, long b, long c, long d, const Rational& kappa) {
  const auto cd = build_cartan_data("A1");
  std::vector<Rational> out;
  for (long s = std::abs(a - b); s <= a + b; s += 2)
    if (s >= std::abs(c - d) && s <= c + d && (s - std::abs(c - d)) % 2 == 0)
      out.push_back((casimir_value(cd, {s}) - casimir_value(cd, {a}) - casimir_value(cd, {b})) / (2 * kappa));
  std::sort(out.begin(), out.end());
  return out;
}

// Verlinde formula for sl(2) level k in floating point
long verlinde(long k, long a, long b, long c) {
  const double n = static_cast<double>(k + 2);
  auto s = [&](long x, long y) { return std::sqrt(2 / n) * std::sin(M_PI * (x + 1) * (y + 1) / n); };
  double acc = 0;
  for (long t = 0; t <= k; ++t) acc += s(a, t) * s(b, t) * s(c, t) / s(0, t);
  return std::lround(acc);
}

}  // namespace

TEST(Braid, RelationsSl2AndSl3) {
  const Irrep v1 = build_irrep(sl2(), {1}), v2 = build_irrep(sl2(), {2});
  for (const auto& f : std::vector<std::vector<Irrep>>{{v1, v1, v2}, {v1, v2, v1, v2}}) {
    const auto rep = check_braid_relations(TensorSpace(sl2(), f));
    EXPECT_TRUE(rep.ok());
    EXPECT_GT(rep.relations_checked, 0u);
  }
  const Irrep w = build_irrep(sl3(), {1, 0}), wd = build_irrep(sl3(), {0, 1});
  EXPECT_TRUE(check_braid_relations(TensorSpace(sl3(), {w, wd, w})).ok());
}

TEST(Braid, RelationIsNotVacuous) {
  // the individual terms do not commute, only the sum does
  const Irrep v1 = build_irrep(sl2(), {1});
  TensorSpace ts(sl2(), {v1, v1, v1});
  const QSparse o01 = omega(ts, 0, 1).matrix, o02 = omega(ts, 0, 2).matrix, o12 = omega(ts, 1, 2).matrix;
  EXPECT_TRUE(sparse_commutator(o01, o02 + o12).is_zero());
  EXPECT_FALSE(sparse_commutator(o01, o02).is_zero());
}

TEST(KZSystem, FlatAtRandomPoints) {
  const Irrep v1 = build_irrep(sl2(), {1});
  const KZSystem kz(sl2(), 1, {v1, v1, v1, v1});
  std::mt19937 rng(9);
  for (int t = 0; t < 5; ++t) {
    std::vector<Rational> x;
    for (long i = 0; i < 4; ++i) x.push_back(make_rational(static_cast<long>(rng() % 50) + 60 * i, 7));
    EXPECT_TRUE(kz.flat_at(x));
  }
  EXPECT_EQ(kz.kappa(), Rational(3));
  EXPECT_THROW(KZSystem(sl2(), -2, {v1, v1}), std::invalid_argument);
}

TEST(ExactEigen, RecoversConjugatedDiagonal) {
  std::mt19937 rng(10);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 2 + rng() % 3;
    QMatrix p(n, n), d(n, n);
    do {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p(i, j) = static_cast<long>(rng() % 5) - 2;
    } while (rank(p) < n);
    std::vector<Rational> vals;
    for (std::size_t i = 0; i < n; ++i) vals.push_back(d(i, i) = make_rational(static_cast<long>(rng() % 9) - 4, 1 + static_cast<long>(rng() % 3)));
    const auto eig = exact_eigen(p * d * inverse(p));
    auto got = eig.values;
    std::sort(got.begin(), got.end());
    std::sort(vals.begin(), vals.end());
    EXPECT_EQ(got, vals);
  }
  QMatrix rot(2, 2);
  rot(0, 1) = -1;
  rot(1, 0) = 1;
  EXPECT_THROW(exact_eigen(rot), std::domain_error);
}

TEST(Frobenius, ExponentsAreCasimirChannels) {
  // B0 = Omega_23 and B1 = Omega_12 on the invariants of L(l0)* (x) ... (x) L(l3)
  for (long k = 1; k <= 3; ++k)
    for (long a = 0; a <= std::min(k, 2L); ++a)
      for (long b = 0; b <= std::min(k, 2L); ++b)
        for (long c = 0; c <= std::min(k, 2L); ++c)
          for (long d = 0; d <= std::min(k, 2L); ++d) {
            if ((a + b + c + d) % 2) continue;
            if (channel_exponents(c, d, a, b, 1).empty()) {
              EXPECT_THROW(reduce_four_point(sl2(), k, {a}, {b}, {c}, {d}), std::runtime_error);
              continue;
            }
            const FuchsianODE ode = reduce_four_point(sl2(), k, {a}, {b}, {c}, {d});
            auto e0 = local_exponents(ode, 0), e1 = local_exponents(ode, 1);
            std::sort(e0.begin(), e0.end());
            std::sort(e1.begin(), e1.end());
            EXPECT_EQ(e0, channel_exponents(c, d, a, b, ode.kappa));
            EXPECT_EQ(e1, channel_exponents(b, c, a, d, ode.kappa));
          }
}

TEST(Frobenius, RankOneClosedForm) {
  // a one-dimensional carrier gives psi = z^{b0/kappa} (1 - z)^{b1/kappa}
  int seen = 0;
  for (long k = 1; k <= 3; ++k)
    for (long a = 0; a <= std::min(k, 2L); ++a)
      for (long b = 0; b <= std::min(k, 2L); ++b)
        for (long c = 0; c <= std::min(k, 2L); ++c)
          for (long d = 0; d <= std::min(k, 2L); ++d) {
            if (channel_exponents(c, d, a, b, 1).size() != 1) continue;
            const FuchsianODE ode = reduce_four_point(sl2(), k, {a}, {b}, {c}, {d});
            ASSERT_EQ(ode.dimension(), 1u);
            ++seen;
            for (int base : {0, 1}) {
              const auto sols = frobenius_solutions(ode, base, 12);
              const auto [res, other] = ode.local_residues(base);
              ASSERT_EQ(sols.size(), 1u);
              EXPECT_EQ(sols[0].exponent, res(0, 0) / ode.kappa);
              const Rational beta = other(0, 0) / ode.kappa;
              const Rational c0 = sols[0].coefficients[0][0];
              for (std::size_t m = 0; m <= 12; ++m)
                EXPECT_EQ(sols[0].coefficients[m][0], c0 * ((m % 2) ? -1 : 1) * general_binomial(beta, m));
            }
          }
  EXPECT_GT(seen, 5);
}

TEST(Frobenius, ResidualVanishesThroughOrder) {
  for (const auto& w : std::vector<std::vector<long>>{{1, 1, 1, 1}, {2, 1, 1, 2}, {1, 2, 1, 2}, {2, 2, 2, 2}}) {
    const FuchsianODE ode = reduce_four_point(sl2(), 3, {w[0]}, {w[1]}, {w[2]}, {w[3]});
    for (int base : {0, 1})
      for (const auto& s : frobenius_solutions(ode, base, 20)) EXPECT_EQ(frobenius_residual_order(ode, s), 20u);
  }
  // sl(3), fundamental and antifundamental
  const FuchsianODE ode3 = reduce_four_point(sl3(), 1, {1, 0}, {1, 0}, {0, 1}, {1, 0});
  for (const auto& s : frobenius_solutions(ode3, 0, 10)) EXPECT_EQ(frobenius_residual_order(ode3, s), 10u);
}

TEST(Frobenius, ResidualCatchesCorruption) {
  const FuchsianODE ode = reduce_four_point(sl2(), 1, {1}, {1}, {1}, {1});
  auto sols = frobenius_solutions(ode, 0, 10);
  sols[0].coefficients[4][0] += 1;
  EXPECT_EQ(frobenius_residual_order(ode, sols[0]), 3u);
}

TEST(Frobenius, ForbiddenChannelNeedsLogarithm) {
  const FuchsianODE ode = reduce_four_point(sl2(), 2, {2}, {2}, {2}, {2});
  EXPECT_THROW(frobenius_solutions(ode, 0, 10), LogTermError);
  EXPECT_THROW(reduce_four_point(sl2(), 1, {1}, {0}, {0}, {0}), std::runtime_error);
}

TEST(Fusion, ClosedFormMatchesVerlinde) {
  for (long k = 0; k <= 5; ++k)
    for (long a = 0; a <= k; ++a)
      for (long b = 0; b <= k; ++b) {
        const auto fr = fusion_rules_sl2(k, make_rational(a, 2), make_rational(b, 2));
        for (long c = 0; c <= k; ++c) {
          const bool in = std::find(fr.channels.begin(), fr.channels.end(), make_rational(c, 2)) != fr.channels.end();
          EXPECT_EQ(in ? 1 : 0, verlinde(k, a, b, c)) << k << " " << a << " " << b << " " << c;
        }
      }
  EXPECT_THROW(fusion_rules_sl2(1, 1, 0), std::invalid_argument);
  EXPECT_THROW(fusion_rules_sl2(2, make_rational(1, 3), 0), std::invalid_argument);
}

TEST(FactorBlocks, BinomialProductIsBinomialOfSum) {
  // (1 - t)^a (1 - t)^b = (1 - t)^{a+b}
  const Rational a = make_rational(-1, 2), b = make_rational(2, 3);
  auto binom_series = [](const Rational& beta, const Rational& r) {
    FrobeniusSolution s;
    s.exponent = r;
    for (std::size_t m = 0; m <= 15; ++m) s.coefficients.push_back({((m % 2) ? -1 : 1) * general_binomial(beta, m)});
    return s;
  };
  const auto prod = factor_blocks({binom_series(a, make_rational(1, 4)), binom_series(b, make_rational(1, 8))});
  const auto direct = binom_series(a + b, make_rational(3, 8));
  EXPECT_EQ(prod.exponent, direct.exponent);
  for (std::size_t m = 0; m <= 15; ++m) EXPECT_EQ(prod.coefficients[m], direct.coefficients[m]);
}

TEST(FactorBlocks, VectorFactorsUseKroneckerLayout) {
  FrobeniusSolution x, y;
  x.coefficients = {{1, 2}, {0, 1}};
  y.coefficients = {{3, 0, 1}, {1, 1, 1}};
  const auto p = factor_blocks({x, y});
  EXPECT_EQ(p.coefficients[0], (QVector{3, 0, 1, 6, 0, 2}));
  // c_1 = x0 (x) y1 + x1 (x) y0
  EXPECT_EQ(p.coefficients[1], (QVector{1, 1, 1, 2 + 3, 2, 2 + 1}));
}

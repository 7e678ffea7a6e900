#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "wznw/cli.hpp"
#include "wznw/io.hpp"

using namespace wznw;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("wznw_test_io_" + name);
  fs::remove_all(p);
  return p;
}

bool mentions(const cli::ConfigError& e, const std::string& needle) { return std::string(e.what()).find(needle) != std::string::npos; }

}  // namespace

TEST(Json, RationalsAreStringPairs) {
  EXPECT_EQ(io::rational_json(make_rational(-3, 6)).dump(), R"(["-1","2"])");
  QMatrix m(1, 2);
  m(0, 1) = make_rational(5, 4);
  EXPECT_EQ(io::matrix_json(m).dump(), R"([[["0","1"],["5","4"]]])");
}

TEST(Json, RealsHaveFixedDigitsAndNoNegativeZero) {
  PrecisionGuard g(30);
  EXPECT_EQ(io::real_string(Real("0.125"), 3), "1.250e-01");
  EXPECT_EQ(io::real_string(-Real(0), 3), io::real_string(Real(0), 3));
  EXPECT_EQ(io::complex_json(Complex(Real(1), Real(-2)), 2).dump(), R"(["1.00e+00","-2.00e+00"])");
}

TEST(Csv, FrobeniusLayout) {
  FrobeniusSolution s;
  s.base_point = 1;
  s.exponent = make_rational(-1, 2);
  s.coefficients = {{1, 0}, {make_rational(1, 3), 2}};
  const std::string csv = io::frobenius_csv({s});
  EXPECT_EQ(csv, "base,exponent,component,c_0,c_1\n1,-1/2,0,1,1/3\n1,-1/2,1,0,2\n");
  EXPECT_EQ(io::graded_dimensions_csv({1, 3}), "depth,dimension\n0,1\n1,3\n");
}

TEST(Config, ParsesSectionsAndOverrides) {
  const auto cfg = cli::parse_config(
      "# comment\n[global]\nalgebra = A1\nlevel = 2\nprecision = 30  # trailing\n\n[task fuse]\nj1 = 1/2\nj2 = 1\n[task voa-check]\n");
  EXPECT_TRUE(cfg.problems.empty());
  EXPECT_EQ(cfg.precision, 30u);
  ASSERT_EQ(cfg.tasks.size(), 2u);
  EXPECT_EQ(cfg.tasks[0].kind, "fuse");
  EXPECT_EQ(cfg.tasks[0].fields.at("j2").first, "1");
  const auto tasks = cli::resolve(cfg);
  EXPECT_EQ(tasks[0].j1, make_rational(1, 2));
  EXPECT_EQ(tasks[1].level, Rational(2));
}

TEST(Config, ReportsEveryProblemWithItsLine) {
  const auto cfg = cli::parse_config(
      "[global]\nlevel = 1\nbogus = 3\n[task fuse]\nj1 = 1\nj2 = 1/3\n[task blocks]\nweights = 1;1;1\n[task warp]\n[task verify-assoc]\nweights = 1;1;1;1\nz1 = 0.5\nz2 = 0.9\n");
  try {
    cli::resolve(cfg);
    FAIL() << "expected ConfigError";
  } catch (const cli::ConfigError& e) {
    EXPECT_TRUE(mentions(e, "line 3: unknown global field 'bogus'"));
    EXPECT_TRUE(mentions(e, "line 5: field 'j1': spin exceeds level/2"));
    EXPECT_TRUE(mentions(e, "line 6: field 'j2': spin must be a nonnegative half-integer"));
    EXPECT_TRUE(mentions(e, "line 8: field 'weights': four-point tasks need exactly four weights"));
    EXPECT_TRUE(mentions(e, "line 9: unknown task 'warp'"));
    EXPECT_TRUE(mentions(e, "|z1| > |z2| > |z1 - z2|"));
  }
}

TEST(Config, RejectsBadWeightsAndLevels) {
  auto problems_of = [](const std::string& text) -> std::string {
    try {
      cli::resolve(cli::parse_config(text));
    } catch (const cli::ConfigError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_NE(problems_of("[global]\nlevel = 1\n[task blocks]\nweights = 1;1;2;1\n").find("exceeds the level"), std::string::npos);
  EXPECT_NE(problems_of("[global]\nlevel = 1\n[task blocks]\nweights = 1;-1;1;1\n").find("dominant integral"), std::string::npos);
  EXPECT_NE(problems_of("[global]\nlevel = 3/2\n[task voa-check]\n").find("nonnegative integer"), std::string::npos);
  EXPECT_NE(problems_of("[global]\nalgebra = E8\n[task voa-check]\n").find("not supported"), std::string::npos);
  EXPECT_NE(problems_of("[global]\nalgebra = B2\n[task voa-check]\n").find("type A"), std::string::npos);
  EXPECT_NE(problems_of("[global]\nalgebra = A2\n[task blocks]\nweights = 1;1;1;1\n").find("needs 2 Dynkin labels"), std::string::npos);
  EXPECT_EQ(problems_of("[global]\nalgebra = A2\nlevel = 1\n[task blocks]\nweights = 1,0;1,0;0,1;1,0\n"), "");
}

TEST(Run, EmptyTaskListWritesNothing) {
  auto cfg = cli::parse_config("[global]\nlevel = 1\n");
  cfg.output = scratch("empty").string();
  const auto outcome = cli::run(cfg);
  EXPECT_TRUE(outcome.pass);
  EXPECT_FALSE(fs::exists(cfg.output));
}

TEST(Run, WritesNumberedFilesAndSummary) {
  auto cfg = cli::parse_config("[global]\nlevel = 1\ndepth = 2\nprecision = 30\nseries_order = 40\n[task fuse]\nj1 = 1/2\nj2 = 1/2\n[task voa-check]\n");
  cfg.output = scratch("run").string();
  const auto outcome = cli::run(cfg);
  EXPECT_TRUE(outcome.pass) << outcome.summary;
  const fs::path out(cfg.output);
  EXPECT_TRUE(fs::exists(out / "01-fuse.json"));
  EXPECT_TRUE(fs::exists(out / "02-voa-check.json"));
  EXPECT_TRUE(fs::exists(out / "02-graded-dimensions.csv"));
  const std::string summary = slurp(out / "summary.txt");
  EXPECT_EQ(summary, outcome.summary);
  EXPECT_NE(summary.find("Virasoro relations: PASS, c = 1"), std::string::npos);
  EXPECT_NE(summary.find("fusion rule: {0}"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(out / "01-fuse.json"));
  EXPECT_EQ(j["channels"], nlohmann::json::array({"0"}));
}

TEST(Run, ParallelMatchesSerial) {
  const std::string text = "[global]\nlevel = 2\nprecision = 20\nseries_order = 20\n[task fuse]\nj1 = 1/2\nj2 = 1/2\n[task blocks]\nweights = 1;1;1;1\n";
  auto a = cli::parse_config(text), b = cli::parse_config(text);
  a.output = scratch("serial").string();
  b.output = scratch("parallel").string();
  b.parallel = true;
  cli::run(a);
  cli::run(b);
  for (const auto& entry : fs::directory_iterator(a.output))
    EXPECT_EQ(slurp(entry.path()), slurp(fs::path(b.output) / entry.path().filename())) << entry.path();
}

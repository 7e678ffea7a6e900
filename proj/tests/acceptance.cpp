// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails. Usage: acceptance <path to wznw-cli> <config>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "wznw/affinevoa.hpp"
#include "wznw/continuation.hpp"
#include "wznw/kz.hpp"
#include "wznw/liealg.hpp"
#include "wznw/numeric.hpp"
#include "wznw/repn.hpp"

using namespace wznw;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(const Real& x) { return x.str(3, std::ios_base::scientific); }

const AlgebraBasis& algebra(const std::string& label) {
  static std::map<std::string, AlgebraBasis> cache;
  auto it = cache.find(label);
  if (it == cache.end()) it = cache.emplace(label, build_algebra_basis(build_cartan_data(label))).first;
  return it->second;
}

// nondecreasing index sequences of length n over [0, m)
void multisets(std::size_t m, std::size_t n, const std::function<void(const std::vector<std::size_t>&)>& f) {
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    f(idx);
    std::size_t i = n;
    while (i > 0 && idx[i - 1] == m - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < n; ++j) idx[j] = idx[i - 1];
  }
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  std::size_t systems = 0, relations = 0, failures = 0;
  for (const std::string label : {"A1", "A2"}) {
    const auto& g = algebra(label);
    std::vector<Irrep> irreps;
    for (const auto& w : admissible_weights(g.cartan, 2)) irreps.push_back(build_irrep(g, w));
    for (std::size_t n : {3u, 4u})
      multisets(irreps.size(), n, [&](const std::vector<std::size_t>& idx) {
        std::vector<Irrep> f;
        for (auto i : idx) f.push_back(irreps[i]);
        const auto rep = check_braid_relations(TensorSpace(g, f));
        ++systems;
        relations += rep.relations_checked;
        failures += rep.failures.size();
      });
  }
  return {failures == 0, std::to_string(relations) + " relations over " + std::to_string(systems) + " weight multisets, " +
                             std::to_string(failures) + " failures"};
}

Outcome criterion2() {
  struct Case {
    std::string label;
    long k, depth;
  };
  bool ok = true;
  std::string detail;
  for (const auto& c : std::vector<Case>{{"A1", 1, 4}, {"A1", 2, 4}, {"A2", 1, 3}}) {
    const auto& g = algebra(c.label);
    const auto tm = build_truncated_module(g, c.k, Weight(g.cartan.rank, 0), c.depth);
    const auto vm = virasoro_modes(tm);
    const Rational oracle = Rational(c.k * static_cast<long>(g.dimension)) / (c.k + g.cartan.dual_coxeter);
    const bool rel = virasoro_relations_hold(tm, vm, 2);
    ok = ok && rel && vm.central_charge == oracle;
    detail += (detail.empty() ? "" : "; ") + c.label + " k=" + std::to_string(c.k) + " c=" + vm.central_charge.get_str() + " (oracle " +
              oracle.get_str() + "), relations " + (rel ? "exact" : "BROKEN");
  }
  return {ok, detail};
}

QVector random_combination(const TruncatedModule& tm, long d, std::mt19937& rng) {
  QVector v(tm.dimension(), Rational(0));
  bool any = false;
  while (!any)
    for (std::size_t i = tm.offset(d); i < tm.offset(d) + tm.dimension_at(d); ++i)
      if (rng() % 2) {
        v[i] = make_rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3));
        any = any || v[i] != 0;
      }
  return v;
}

Outcome criterion3() {
  std::mt19937 rng(20240601);
  const auto& g = algebra("A1");
  // iterate formula: V = M(k, 0) or L(k, 0) acting on truncated modules of depth 4
  struct Setup {
    TruncatedModule voa, target;
  };
  std::vector<Setup> setups;
  setups.push_back({build_truncated_module(g, 1, {0}, 3), irreducible_quotient(build_truncated_module(g, 1, {1}, 4), 4)});
  setups.push_back({build_truncated_module(g, 2, {0}, 3), build_truncated_module(g, 2, {1}, 4)});
  setups.push_back({irreducible_quotient(build_truncated_module(g, 2, {0}, 3), 3), irreducible_quotient(build_truncated_module(g, 2, {2}, 4), 4)});
  std::vector<std::unique_ptr<VertexOperatorMap>> maps;
  for (const auto& s : setups) maps.push_back(std::make_unique<VertexOperatorMap>(s.target));
  int iter_checked = 0, iter_ok = 0, iter_nonzero = 0, resampled = 0;
  while (iter_checked < 20) {
    const std::size_t which = rng() % setups.size();
    const auto& s = setups[which];
    const long du = 1 + static_cast<long>(rng() % 2), dw = 1 + static_cast<long>(rng() % 2);
    const QVector u = random_combination(s.voa, du, rng), w = random_combination(s.voa, dw, rng);
    const QVector v = random_combination(s.target, static_cast<long>(rng() % 3), rng);
    const long n = static_cast<long>(rng() % 5) - 2;
    try {
      const auto rep = iterate_formula(s.voa, *maps[which], u, w, n, v);
      ++iter_checked;
      iter_ok += rep.holds();
      iter_nonzero += !is_zero(rep.lhs);
    } catch (const DepthOverflow&) {
      ++resampled;
    }
    if (resampled > 2000) break;
  }
  // L(-1) formula: kappa L(-1) w = sum x_a(-1) x^a(0) w for w killed by positive modes:
  // random combinations of top-level vectors, and of the singular vector
  // e(-1)^{k+1} 1 of M(k, 0) with a top vector
  int lm1_checked = 0, lm1_ok = 0;
  const auto& g3 = algebra("A2");
  while (lm1_checked < 20) {
    const bool use_sl3 = lm1_checked % 4 == 3;
    const auto& alg = use_sl3 ? g3 : g;
    const long k = 1 + static_cast<long>(rng() % 3);
    const auto weights = admissible_weights(alg.cartan, k);
    const Weight lambda = weights[rng() % weights.size()];
    const long depth = use_sl3 ? 2 : 4;
    const auto tm = build_truncated_module(alg, k, lambda, depth);
    QVector w = random_combination(tm, 0, rng);
    if (!use_sl3 && lambda == Weight{0} && k + 1 < depth && rng() % 2) {
      const std::size_t e = alg.e[0];
      w = tm.coordinates(tm.induced().word_state(Word(static_cast<std::size_t>(k + 1), ModeLetter{e, -1}), 0));
    }
    const auto rep = check_l_minus1(tm, w);
    if (!rep.precondition_holds) continue;
    ++lm1_checked;
    lm1_ok += rep.identity_holds;
  }
  const bool pass = iter_checked == 20 && iter_ok == 20 && iter_nonzero > 0 && lm1_ok == 20;
  return {pass, "iterate " + std::to_string(iter_ok) + "/" + std::to_string(iter_checked) + " exact (" + std::to_string(iter_nonzero) +
                    " nonzero, " + std::to_string(resampled) + " resampled); L(-1) " + std::to_string(lm1_ok) + "/" + std::to_string(lm1_checked) +
                    " exact"};
}

// power sums p_i = tr(B^i) / kappa^i determine the exponent multiset
bool exponents_match_residue(const QMatrix& b, const Rational& kappa, const std::vector<Rational>& exps) {
  QMatrix power = QMatrix::identity(b.rows());
  Rational scale = 1;
  for (std::size_t i = 1; i <= b.rows(); ++i) {
    power = power * b;
    scale *= kappa;
    Rational tr = 0, ps = 0;
    for (std::size_t r = 0; r < b.rows(); ++r) tr += power(r, r);
    for (const auto& e : exps) {
      Rational p = 1;
      for (std::size_t j = 0; j < i; ++j) p *= e;
      ps += p;
    }
    if (tr / scale != ps) return false;
  }
  return exps.size() == b.rows();
}

Outcome criterion4() {
  const auto& g = algebra("A1");
  std::size_t systems = 0, bad = 0, with_logs = 0;
  for (long k = 1; k <= 3; ++k) {
    const long top = std::min(k, 2L);
    for (long a = 0; a <= top; ++a)
      for (long b = 0; b <= top; ++b)
        for (long c = 0; c <= top; ++c)
          for (long d = 0; d <= top; ++d) {
            std::optional<FuchsianODE> ode;
            try {
              ode = reduce_four_point(g, k, {a}, {b}, {c}, {d});
            } catch (const std::runtime_error&) {
              continue;  // no invariants
            }
            ++systems;
            for (int base : {0, 1}) {
              const QMatrix res = ode->local_residues(base).first;
              const ExactEigen eig = exact_eigen(res);
              std::vector<Rational> exps;
              for (std::size_t s = 0; s < ode->dimension(); ++s) {
                try {
                  const auto sol = frobenius_solution(*ode, base, 4, eig, s);
                  // leading coefficient lies in ker(kappa r - B)
                  QVector lhs = res * sol.coefficients[0];
                  for (std::size_t i = 0; i < lhs.size(); ++i) lhs[i] -= ode->kappa * sol.exponent * sol.coefficients[0][i];
                  if (!is_zero(lhs) || is_zero(sol.coefficients[0])) ++bad;
                  exps.push_back(sol.exponent);
                } catch (const LogTermError&) {
                  ++with_logs;
                  exps.push_back(eig.values[s] / ode->kappa);
                }
              }
              if (!exponents_match_residue(res, ode->kappa, exps)) ++bad;
            }
          }
  }
  return {bad == 0 && systems > 0, std::to_string(systems) + " systems, both base points, " + std::to_string(bad) + " mismatches (" +
                                      std::to_string(with_logs) + " resonant solutions in forbidden channels)"};
}

Outcome criterion5() {
  const auto& g = algebra("A1");
  bool ok = true;
  std::string detail;
  for (long k = 1; k <= 2; ++k) {
    const FuchsianODE ode = reduce_four_point(g, k, {1}, {1}, {1}, {1});
    const ExtensionReport er = verify_extension_property(g, ode, 40, 50);
    bool strict = true;
    for (const auto& [r, s] : er.exponents) strict = strict && (er.wt_sum + s > Rational(er.n));
    ok = ok && er.status && strict && !er.logarithms && !er.exponents.empty();
    detail += (detail.empty() ? "" : "; ") + std::string("k=") + std::to_string(k) + " N=" + std::to_string(er.n) + " (r,s) =";
    for (const auto& [r, s] : er.exponents) detail += " (" + r.get_str() + "," + s.get_str() + ")";
    detail += er.logarithms ? " logs" : " no logs";
  }
  return {ok, detail};
}

Outcome criterion6() {
  const auto& g = algebra("A1");
  Real worst = 0;
  for (long k = 1; k <= 2; ++k) {
    const FuchsianODE ode = reduce_four_point(g, k, {1}, {1}, {1}, {1});
    const ConnectionMatrix cm = connection_matrix(ode, 40, 50);
    const SolutionBases bases = solution_bases(ode, 40);
    const NumericODE nod = to_numeric(ode);
    for (const char* zs : {"0.4", "0.5", "0.6"}) {
      const Complex z{Real(zs)};
      const CMatrix region0 = local_basis_at(nod, bases.at0, z, 50, Real("1e-6"));
      const CMatrix region1 = series_matrix(bases.at1, z, Real("1e-6")) * cm.matrix;
      worst = std::max(worst, max_abs(region0 - region1));
    }
  }
  return {worst <= Real("1e-8"), "max |Phi0 - Phi1 C| over k=1,2 and z in {0.4,0.5,0.6}: " + sci(worst) + " (tol 1e-8)"};
}

Outcome criterion7() {
  const auto& g = algebra("A1");
  Real contractible = 0, eigen = 0, relation = 0, braiding = 0;
  for (long k = 1; k <= 2; ++k) {
    const FuchsianODE ode = reduce_four_point(g, k, {1}, {1}, {1}, {1});
    const NumericODE nod = to_numeric(ode);
    const std::size_t n = ode.dimension();
    // a circle enclosing no singular point, and a loop about 0 followed by its reverse
    Path small(Complex(Real(1) / 2));
    small.arc(Complex(Real("0.5"), Real("0.3")), Real(1), 24);
    Path there_and_back = loop_path(Loop::AroundZero);
    there_and_back.append(loop_path(Loop::AroundZero).reversed());
    for (const Path* p : {&small, &there_and_back})
      contractible = std::max(contractible, max_abs(transport(nod, *p, 50) - CMatrix::identity(n)));
    const auto m0 = monodromy(ode, Loop::AroundZero, 40, 50);
    const auto m1 = monodromy(ode, Loop::AroundOne, 40, 50);
    const auto mi = monodromy(ode, Loop::AroundInfinity, 40, 50);
    for (const auto* mm : {&m0, &m1})
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          eigen = std::max(eigen, abs(mm->matrix(i, j) - (i == j ? phase(mm->exponents[i]) : Complex(0))));
    relation = std::max(relation, max_abs(mi.transport * m0.transport * m1.transport - CMatrix::identity(n)));
    const CMatrix h = half_monodromy(ode, 40, 50);
    braiding = std::max(braiding, max_abs(h * h - m1.matrix));
  }
  const bool ok = contractible <= Real("1e-10") && eigen <= Real("1e-10") && relation <= Real("1e-8") && braiding <= Real("1e-10");
  return {ok, "contractible " + sci(contractible) + ", eigenphase " + sci(eigen) + ", M_inf M_0 M_1 - 1 " + sci(relation) + ", H^2 - M_1 " +
                  sci(braiding)};
}

Outcome criterion8() {
  const auto& g = algebra("A1");
  const NPointSystem sys = npoint_system(g, 1, {{1}, {1}, {1}, {1}, {0}});
  const NPointReport rep = verify_n_point(sys, {Complex(1), Complex(Real("0.5")), Complex(Real("0.2"))}, 30, 50);
  const bool ok = rep.max_tail_ratio < Real("0.6") && rep.doubling_difference <= Real("1e-8");
  return {ok, "tail ratio " + rep.max_tail_ratio.str(4) + " (< 0.6), |F_30 - F_60| " + sci(rep.doubling_difference) + " (tol 1e-8), " +
                  std::to_string(rep.values.size()) + " solutions"};
}

// sl(2) depth-graded character of L(k, lambda) from the Weyl-Kac formula at z = 1
std::vector<mpz_class> sl2_character(long k, long lambda, std::size_t len) {
  std::vector<mpz_class> num(len, 0), den(len, 0), q(len, 0);
  for (long m = -20; m <= 20; ++m) {
    const long e = (k + 2) * m * m + (lambda + 1) * m, f = 2 * m * m + m;
    if (e >= 0 && e < static_cast<long>(len)) num[static_cast<std::size_t>(e)] += lambda + 1 + 2 * (k + 2) * m;
    if (f >= 0 && f < static_cast<long>(len)) den[static_cast<std::size_t>(f)] += 1 + 4 * m;
  }
  for (std::size_t i = 0; i < len; ++i) {
    q[i] = num[i];
    for (std::size_t j = 1; j <= i; ++j) q[i] -= den[j] * q[i - j];
  }
  return q;
}

Outcome criterion9() {
  // (a) irreps of sl2, sl3, sl4 with Weyl dimension <= 64
  std::size_t irreps = 0, dim_bad = 0;
  for (const std::string label : {"A1", "A2", "A3"}) {
    const auto& g = algebra(label);
    const auto& cd = g.cartan;
    std::function<void(std::size_t, Weight&)> rec = [&](std::size_t i, Weight& w) {
      if (i == cd.rank) {
        if (weyl_dimension(cd, w) > 64) return;
        ++irreps;
        const Irrep rep = build_irrep(g, w);
        // sl(r+1): prod_{i<j} (sum_{i<=m<j} (lambda_m + 1)) / (j - i)
        Rational prod = 1;
        for (std::size_t i = 0; i <= cd.rank; ++i)
          for (std::size_t j = i + 1; j <= cd.rank; ++j) {
            long s = 0;
            for (std::size_t m = i; m < j; ++m) s += w[m] + 1;
            prod *= make_rational(s, static_cast<long>(j - i));
          }
        if (Rational(static_cast<long>(rep.dimension)) != prod) ++dim_bad;
        return;
      }
      for (long a = 0; a <= 63; ++a) {
        w[i] = a;
        Weight probe(cd.rank, 0);
        probe[i] = a;
        if (weyl_dimension(cd, probe) > 64) break;
        rec(i + 1, w);
      }
      w[i] = 0;
    };
    Weight w(cd.rank, 0);
    rec(0, w);
  }
  // (b) L(1, 0) graded dimensions
  const auto l = irreducible_quotient(build_truncated_module(algebra("A1"), 1, {0}, 4), 4);
  const auto oracle = sl2_character(1, 0, 5);
  bool char_ok = true;
  std::string dims;
  for (long d = 0; d <= 4; ++d) {
    char_ok = char_ok && mpz_class(l.dimension_at(d)) == oracle[static_cast<std::size_t>(d)];
    dims += (d ? " " : "") + std::to_string(l.dimension_at(d));
  }
  // (c) fusion for k <= 3
  std::size_t fusion_cases = 0, fusion_bad = 0;
  for (long k = 1; k <= 3; ++k)
    for (long a = 0; a <= k; ++a)
      for (long b = 0; b <= k; ++b) {
        ++fusion_cases;
        const auto fr = fusion_rules_sl2(k, make_rational(a, 2), make_rational(b, 2));
        const auto fc = fusion_by_exponent_filter(algebra("A1"), k, make_rational(a, 2), make_rational(b, 2), 40, 50);
        if (fc.channels != fr.channels || fc.block_dimension != fr.channels.size()) ++fusion_bad;
      }
  const bool ok = dim_bad == 0 && char_ok && fusion_bad == 0;
  return {ok, std::to_string(irreps) + " irreps (" + std::to_string(dim_bad) + " bad); L(1,0) dims " + dims + (char_ok ? " match" : " MISMATCH") +
                  "; fusion " + std::to_string(fusion_cases - fusion_bad) + "/" + std::to_string(fusion_cases)};
}

Outcome criterion10(const std::string& cli, const std::string& config) {
  const fs::path base = fs::temp_directory_path() / "wznw_acceptance_determinism";
  fs::remove_all(base);
  std::vector<fs::path> runs{base / "run1", base / "run2", base / "run3"};
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string cmd = "\"" + cli + "\" --config \"" + config + "\" --out \"" + runs[i].string() + "\"" + (i == 2 ? " --parallel" : "") +
                            " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    if (rc != 0) return {false, "CLI run " + std::to_string(i + 1) + " exited with status " + std::to_string(rc)};
  }
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  std::size_t files = 0, differing = 0;
  std::set<std::string> names;
  for (const auto& r : runs)
    for (const auto& e : fs::directory_iterator(r)) names.insert(e.path().filename().string());
  for (const auto& name : names) {
    ++files;
    const std::string first = slurp(runs[0] / name);
    for (std::size_t i = 1; i < runs.size(); ++i)
      if (!fs::exists(runs[i] / name) || slurp(runs[i] / name) != first) {
        ++differing;
        break;
      }
  }
  return {files > 0 && differing == 0, std::to_string(files) + " files compared across 2 serial runs and 1 parallel run, " +
                                           std::to_string(differing) + " differ"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <wznw-cli> <config>\n";
    return 2;
  }
  PrecisionGuard guard(60);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact infinitesimal braid relations, sl(2) and sl(3), n = 3, 4, (lambda, theta) <= 2", criterion1},
      {"Virasoro relations and central charge on truncated M(k, 0)", criterion2},
      {"iterate formula and L(-1) formula on randomized states", criterion3},
      {"Frobenius exponents equal residue eigenvalues over kappa", criterion4},
      {"extension property for spin-1/2 four-point systems, k = 1, 2", criterion5},
      {"overlap agreement of region-0 and region-1 bases through C", criterion6},
      {"monodromy and braiding", criterion7},
      {"three-point product convergence at (1, 0.5, 0.2)", criterion8},
      {"structural oracles: Weyl dimension, L(1,0) character, fusion", criterion9},
      {"determinism of CLI output", [&] { return criterion10(argv[1], argv[2]); }},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    all = all && o.pass;
    std::ostringstream line;
    line << (o.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first << " | " << o.detail << " | "
         << std::fixed << std::setprecision(1) << secs << " s";
    std::cout << line.str() << std::endl;
  }
  return all ? 0 : 1;
}

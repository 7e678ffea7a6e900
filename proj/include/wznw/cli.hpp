#pragma once

// Batch runner behind the wznw-cli tool: config parsing and validation, task
// dispatch, output files and the verification summary.

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wznw/affinevoa.hpp"
#include "wznw/continuation.hpp"
#include "wznw/io.hpp"
#include "wznw/kz.hpp"
#include "wznw/liealg.hpp"
#include "wznw/numeric.hpp"
#include "wznw/repn.hpp"

namespace wznw::cli {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::vector<std::string>& problems)
      : std::runtime_error(join(problems)), problems_(problems) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += x + "\n";
    return s;
  }
  std::vector<std::string> problems_;
};

struct TaskSpec {
  std::string kind;
  int line = 0;
  std::map<std::string, std::pair<std::string, int>> fields;  // key -> (value, line)
};

struct RunConfig {
  std::string algebra = "A1";
  std::string level = "1";
  unsigned precision = 50;
  long series_order = 40;
  long depth = 4;
  std::string output = "out";
  bool parallel = false;
  std::vector<TaskSpec> tasks;
  std::vector<std::string> problems;  // syntax problems, reported by resolve()
};

inline const std::vector<std::string>& task_kinds() {
  static const std::vector<std::string> kinds{"fuse", "blocks", "connect", "monodromy", "verify-assoc", "verify-npoint", "voa-check"};
  return kinds;
}

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

/// Flat key = value text with [global] and [task <kind>] sections; '#' starts
/// a comment. Syntax problems are collected, not thrown, so that resolve()
/// can report them together with field-level ones.
inline RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::vector<std::string> problems;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  enum { None, Global, Task } section = None;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(where + ": unterminated section header");
        continue;
      }
      const std::string head = trim(line.substr(1, line.size() - 2));
      if (head == "global") {
        section = Global;
      } else if (head.rfind("task", 0) == 0) {
        const std::string kind = trim(head.substr(4));
        if (std::find(task_kinds().begin(), task_kinds().end(), kind) == task_kinds().end()) {
          problems.push_back(where + ": unknown task '" + kind + "'");
          section = None;
          continue;
        }
        cfg.tasks.push_back(TaskSpec{kind, lineno, {}});
        section = Task;
      } else {
        problems.push_back(where + ": unknown section '" + head + "'");
        section = None;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(where + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (section == Global) {
      auto as_long = [&](long& dst) {
        try {
          std::size_t used = 0;
          dst = std::stol(value, &used);
          if (used != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
          problems.push_back(where + ": field '" + key + "': not an integer");
        }
      };
      if (key == "algebra") {
        cfg.algebra = value;
      } else if (key == "level") {
        cfg.level = value;
      } else if (key == "precision") {
        long p = 0;
        as_long(p);
        cfg.precision = static_cast<unsigned>(std::max(0L, p));
        if (p <= 0) problems.push_back(where + ": field 'precision': must be positive");
      } else if (key == "series_order") {
        as_long(cfg.series_order);
      } else if (key == "depth") {
        as_long(cfg.depth);
      } else if (key == "output") {
        cfg.output = value;
      } else {
        problems.push_back(where + ": unknown global field '" + key + "'");
      }
    } else if (section == Task) {
      cfg.tasks.back().fields[key] = {value, lineno};
    } else {
      problems.push_back(where + ": field '" + key + "' outside any section");
    }
  }
  cfg.problems = std::move(problems);
  return cfg;
}

// ---------------------------------------------------------------------------
// Resolved tasks

struct ResolvedTask {
  std::string kind;
  std::string algebra;
  Rational level;
  std::vector<Weight> weights;
  Rational j1, j2;
  std::vector<Complex> points;
  Complex z1, z2;
  long depth = 0;
  long series_order = 0;
  unsigned precision = 0;
  double tolerance = 1e-8;
};

struct TaskResult {
  std::string header;
  std::vector<std::string> lines;
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> files;  // name, content
};

inline Complex parse_complex(const std::string& s) {
  const auto parts = split(s, ',');
  if (parts.size() == 1) return Complex(Real(parts[0]));
  if (parts.size() == 2) return Complex(Real(parts[0]), Real(parts[1]));
  throw std::invalid_argument("complex value must be 're' or 're,im'");
}

inline Weight parse_weight(const std::string& s, std::size_t rank) {
  Weight w;
  for (const auto& p : split(s, ',')) {
    std::size_t used = 0;
    const long v = std::stol(p, &used);
    if (used != p.size()) throw std::invalid_argument("bad label '" + p + "'");
    w.push_back(v);
  }
  if (w.size() != rank) throw std::invalid_argument("weight '" + s + "' needs " + std::to_string(rank) + " Dynkin labels");
  return w;
}

/// Validates every task before anything is computed. Problems carry the
/// line of the offending field.
inline std::vector<ResolvedTask> resolve(const RunConfig& cfg) {
  std::vector<std::string> problems = cfg.problems;
  std::vector<ResolvedTask> out;
  if (cfg.series_order <= 0) problems.push_back("global: field 'series_order': must be positive");
  if (cfg.depth <= 0) problems.push_back("global: field 'depth': must be positive");
  if (cfg.precision == 0) problems.push_back("global: field 'precision': must be positive");
  for (const auto& t : cfg.tasks) {
    ResolvedTask r;
    r.kind = t.kind;
    r.depth = cfg.depth;
    r.series_order = cfg.series_order;
    r.precision = cfg.precision;
    const std::string where = "task '" + t.kind + "' (line " + std::to_string(t.line) + ")";
    auto field = [&](const std::string& key, const std::string& fallback) -> std::pair<std::string, std::string> {
      auto it = t.fields.find(key);
      if (it == t.fields.end()) return {fallback, where + ": field '" + key + "'"};
      return {it->second.first, "line " + std::to_string(it->second.second) + ": field '" + key + "'"};
    };
    std::set<std::string> known{"algebra", "level", "weights", "j1", "j2", "points", "z1", "z2", "depth", "series_order", "tolerance"};
    for (const auto& [k, v] : t.fields)
      if (!known.count(k)) problems.push_back("line " + std::to_string(v.second) + ": unknown field '" + k + "' for task '" + t.kind + "'");
    const auto [alg, alg_where] = field("algebra", cfg.algebra);
    r.algebra = alg;
    std::optional<CartanData> cd;
    try {
      cd = build_cartan_data(alg);
    } catch (const std::exception& e) {
      problems.push_back(alg_where + ": " + e.what());
      continue;
    }
    const auto [lev, lev_where] = field("level", cfg.level);
    try {
      r.level = parse_rational(lev);
      if (!is_integer(r.level) || r.level < 0) problems.push_back(lev_where + ": level must be a nonnegative integer");
    } catch (const std::exception&) {
      problems.push_back(lev_where + ": not a number");
      continue;
    }
    auto long_field = [&](const std::string& key, long& dst) {
      auto it = t.fields.find(key);
      if (it == t.fields.end()) return;
      try {
        dst = std::stol(it->second.first);
        if (dst <= 0) throw std::invalid_argument("nonpositive");
      } catch (const std::exception&) {
        problems.push_back("line " + std::to_string(it->second.second) + ": field '" + key + "': must be a positive integer");
      }
    };
    long_field("depth", r.depth);
    long_field("series_order", r.series_order);
    if (auto it = t.fields.find("tolerance"); it != t.fields.end()) {
      try {
        r.tolerance = std::stod(it->second.first);
        if (!(r.tolerance > 0)) throw std::invalid_argument("nonpositive");
      } catch (const std::exception&) {
        problems.push_back("line " + std::to_string(it->second.second) + ": field 'tolerance': must be a positive number");
      }
    }
    auto check_weight = [&](const Weight& w, const std::string& w_where) {
      if (!is_dominant_integral(w)) problems.push_back(w_where + ": weight must be dominant integral");
      else if (level_of(*cd, w) > r.level) problems.push_back(w_where + ": weight exceeds the level ((lambda, theta) > k)");
    };
    const bool needs_sl_realization = t.kind == "voa-check" || t.kind == "fuse" || t.kind == "blocks" || t.kind == "connect" ||
                                      t.kind == "monodromy" || t.kind == "verify-assoc" || t.kind == "verify-npoint";
    if (needs_sl_realization && cd->type_label.front() != 'A') {
      problems.push_back(alg_where + ": only type A algebras have a matrix realization");
      continue;
    }
    if (t.kind == "fuse") {
      if (cd->rank != 1) problems.push_back(alg_where + ": fuse needs A1");
      for (auto* dst : {&r.j1, &r.j2}) {
        const std::string key = dst == &r.j1 ? "j1" : "j2";
        const auto [v, vw] = field(key, "");
        if (v.empty()) {
          problems.push_back(vw + ": missing");
          continue;
        }
        try {
          *dst = parse_rational(v);
          if (!is_integer(2 * *dst) || *dst < 0) problems.push_back(vw + ": spin must be a nonnegative half-integer");
          else if (2 * *dst > r.level) problems.push_back(vw + ": spin exceeds level/2");
        } catch (const std::exception&) {
          problems.push_back(vw + ": not a number");
        }
      }
    }
    if (t.kind == "blocks" || t.kind == "connect" || t.kind == "monodromy" || t.kind == "verify-assoc" || t.kind == "verify-npoint") {
      const auto [v, vw] = field("weights", "");
      if (v.empty()) {
        problems.push_back(vw + ": missing");
      } else {
        try {
          for (const auto& part : split(v, ';')) r.weights.push_back(parse_weight(part, cd->rank));
          for (const auto& w : r.weights) check_weight(w, vw);
          if (t.kind != "verify-npoint" && r.weights.size() != 4) problems.push_back(vw + ": four-point tasks need exactly four weights");
          if (t.kind == "verify-npoint" && r.weights.size() < 4) problems.push_back(vw + ": need weights at infinity, at least two insertions, and at 0");
        } catch (const std::exception& e) {
          problems.push_back(vw + ": " + e.what());
        }
      }
    }
    if (t.kind == "verify-assoc") {
      bool parsed = true;
      for (auto* dst : {&r.z1, &r.z2}) {
        const std::string key = dst == &r.z1 ? "z1" : "z2";
        const auto [v, vw] = field(key, "");
        try {
          *dst = parse_complex(v);
        } catch (const std::exception&) {
          problems.push_back(vw + ": expected 're' or 're,im'");
          parsed = false;
        }
      }
      if (parsed) {
        const Real a1 = abs(r.z1), a2 = abs(r.z2), a12 = abs(r.z1 - r.z2);
        if (!(a1 > a2 && a2 > a12 && a12 > 0)) problems.push_back(where + ": need |z1| > |z2| > |z1 - z2| > 0");
      }
    }
    if (t.kind == "verify-npoint") {
      const auto [v, vw] = field("points", "");
      try {
        for (const auto& p : split(v, ';')) r.points.push_back(parse_complex(p));
        if (r.weights.size() >= 2 && r.points.size() + 2 != r.weights.size())
          problems.push_back(vw + ": need one point per insertion weight");
      } catch (const std::exception&) {
        problems.push_back(vw + ": expected points 're[,im]' separated by ';'");
      }
    }
    out.push_back(std::move(r));
  }
  if (!problems.empty()) throw ConfigError(problems);
  return out;
}

// ---------------------------------------------------------------------------
// Tasks

inline std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

inline std::string weights_string(const std::vector<Weight>& ws) {
  std::string s;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (i) s += ";";
    for (std::size_t j = 0; j < ws[i].size(); ++j) s += (j ? "," : "") + std::to_string(ws[i][j]);
  }
  return s;
}

inline std::string sci(const Real& x) { return io::real_string(x, 3); }

inline TaskResult run_voa_check(const ResolvedTask& t) {
  TaskResult res;
  const auto cd = build_cartan_data(t.algebra);
  const auto g = build_algebra_basis(cd);
  res.header = "voa-check " + t.algebra + " k=" + t.level.get_str() + " D=" + std::to_string(t.depth);
  const Weight zero(cd.rank, 0);
  const TruncatedModule m = build_truncated_module(g, t.level, zero, t.depth);
  const VirasoroModes vm = virasoro_modes(m);
  const bool vir = virasoro_relations_hold(m, vm, std::min(2L, t.depth));
  res.lines.push_back("Virasoro relations: " + pass_fail(vir) + ", c = " + vm.central_charge.get_str());
  const Rational expected = t.level * static_cast<long>(g.dimension) / (t.level + cd.dual_coxeter);
  res.lines.push_back("central charge k dim g / (k + h) = " + expected.get_str() + ": " + pass_fail(expected == vm.central_charge));
  const TruncatedModule l = irreducible_quotient(m, t.depth);
  // omega_{n+1} = L(n) through the vertex operator map
  bool omega_ok = true;
  VertexOperatorMap y(l);
  const auto words = omega_words(g, t.level);
  for (long n = -std::min(2L, t.depth); n <= std::min(2L, t.depth); ++n) {
    QSparse acc(l.dimension(), l.dimension());
    for (const auto& [c, w] : words) acc = acc + c * y.word_mode(w, n + 1).matrix;
    if (!(l.windowed(-n, acc).matrix == sugawara_mode(l, n).matrix)) omega_ok = false;
  }
  res.lines.push_back("Y(omega, x) modes equal Sugawara L(n) on L(k,0): " + pass_fail(omega_ok));
  bool lm1 = true;
  for (const auto& lambda : admissible_weights(cd, t.level)) {
    const TruncatedModule top = irreducible_quotient(build_truncated_module(g, t.level, lambda, 1), 1);
    for (std::size_t i = 0; i < top.dimension_at(0); ++i) {
      const auto r = check_l_minus1(top, top.unit(i));
      lm1 = lm1 && r.precondition_holds && r.identity_holds;
    }
  }
  res.lines.push_back("L(-1) formula on top levels of all L(k,lambda): " + pass_fail(lm1));
  const auto dims = l.graded_dimensions();
  std::string ds;
  for (auto d : dims) ds += " " + std::to_string(d);
  res.lines.push_back("graded dimensions of L(k,0):" + ds);
  res.pass = vir && expected == vm.central_charge && omega_ok && lm1;
  io::ordered_json j;
  j["algebra"] = t.algebra;
  j["level"] = io::rational_json(t.level);
  j["depth"] = t.depth;
  j["central_charge"] = io::rational_json(vm.central_charge);
  j["virasoro_relations"] = vir;
  j["omega_modes"] = omega_ok;
  j["l_minus_one"] = lm1;
  j["graded_dimensions_M"] = m.graded_dimensions();
  j["graded_dimensions_L"] = dims;
  res.files.emplace_back("voa-check.json", j.dump(2) + "\n");
  res.files.emplace_back("graded-dimensions.csv", io::graded_dimensions_csv(dims));
  return res;
}

inline std::string rational_set(const std::vector<Rational>& v) {
  std::string s = "{";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].get_str();
  return s + "}";
}

inline TaskResult run_fuse(const ResolvedTask& t) {
  TaskResult res;
  const auto g = build_algebra_basis(build_cartan_data(t.algebra));
  res.header = "fuse k=" + t.level.get_str() + " j1=" + t.j1.get_str() + " j2=" + t.j2.get_str();
  const FusionRule fr = fusion_rules_sl2(t.level, t.j1, t.j2);
  const FusionCheck fc = fusion_by_exponent_filter(g, t.level, t.j1, t.j2, static_cast<std::size_t>(t.series_order), t.precision);
  const bool ok = fc.channels == fr.channels && fc.block_dimension == fr.channels.size();
  res.lines.push_back("fusion rule: " + rational_set(fr.channels));
  res.lines.push_back("exponent filter on the four-point blocks agrees: " + pass_fail(ok) + ", " + rational_set(fc.channels) +
                      ", block dimension " + std::to_string(fc.block_dimension));
  res.pass = ok;
  io::ordered_json j;
  j["level"] = t.level.get_str();
  j["j1"] = t.j1.get_str();
  j["j2"] = t.j2.get_str();
  std::vector<std::string> ch, fch;
  for (const auto& c : fr.channels) ch.push_back(c.get_str());
  for (const auto& c : fc.channels) fch.push_back(c.get_str());
  j["channels"] = ch;
  j["exponent_filter_channels"] = fch;
  j["block_dimension"] = fc.block_dimension;
  res.files.emplace_back("fuse.json", j.dump(2) + "\n");
  return res;
}

/// det(kappa r - B) == 0 for every exponent r.
inline bool indicial_ok(const QMatrix& b, const Rational& kappa, const std::vector<FrobeniusSolution>& sols) {
  for (const auto& s : sols) {
    QMatrix m = kappa * s.exponent * QMatrix::identity(b.rows()) - b;
    if (rank(m) == b.rows()) return false;
  }
  return true;
}

inline TaskResult run_blocks(const ResolvedTask& t) {
  TaskResult res;
  const auto cd = build_cartan_data(t.algebra);
  const auto g = build_algebra_basis(cd);
  res.header = "blocks " + t.algebra + " k=" + t.level.get_str() + " weights=" + weights_string(t.weights);
  const FuchsianODE ode = reduce_four_point(g, t.level, t.weights[0], t.weights[1], t.weights[2], t.weights[3]);
  const auto order = static_cast<std::size_t>(t.series_order);
  io::ordered_json j = io::residues_json(ode);
  res.lines.push_back("carrier (invariant) dimension: " + std::to_string(ode.dimension()));
  const bool binf = (ode.b0 + ode.b1 + ode.b_infinity()).is_zero();
  res.lines.push_back("B0 + B1 + Binf = 0: " + pass_fail(binf));
  bool ok = binf;
  std::string csv;
  for (int base : {0, 1}) {
    try {
      const auto sols = frobenius_solutions(ode, base, order);
      const bool ind = indicial_ok(ode.local_residues(base).first, ode.kappa, sols);
      bool resid = true;
      for (const auto& s : sols) resid = resid && frobenius_residual_order(ode, s) == order;
      std::vector<Rational> ex;
      for (const auto& s : sols) ex.push_back(s.exponent);
      res.lines.push_back("exponents at z = " + std::to_string(base) + ": " + rational_set(ex) + ", indicial " + pass_fail(ind) +
                          ", residual through order " + std::to_string(order) + " " + pass_fail(resid));
      ok = ok && ind && resid;
      const std::string part = io::frobenius_csv(sols);
      csv += base == 0 ? part : part.substr(part.find('\n') + 1);
      j[base == 0 ? "exponents_at_0" : "exponents_at_1"] = io::rational_list_json(ex);
    } catch (const LogTermError& e) {
      res.lines.push_back(std::string("Frobenius solutions at z = ") + std::to_string(base) + ": FAIL, " + e.what());
      ok = false;
    }
  }
  if (ok) {
    const ExtensionReport er = verify_extension_property(g, ode, order, t.precision);
    std::string pairs;
    for (const auto& [r, s] : er.exponents) pairs += " (r=" + r.get_str() + ", s=" + s.get_str() + ")";
    res.lines.push_back("convergence and extension property: " + pass_fail(er.status && !er.logarithms) + ", N = " + std::to_string(er.n) +
                        "," + pairs);
    j["extension"] = io::extension_json(er);
    ok = ok && er.status && !er.logarithms;
  }
  res.pass = ok;
  res.files.emplace_back("blocks.json", j.dump(2) + "\n");
  res.files.emplace_back("frobenius.csv", csv);
  return res;
}

inline TaskResult run_connect(const ResolvedTask& t) {
  TaskResult res;
  const auto g = build_algebra_basis(build_cartan_data(t.algebra));
  res.header = "connect " + t.algebra + " k=" + t.level.get_str() + " weights=" + weights_string(t.weights);
  const FuchsianODE ode = reduce_four_point(g, t.level, t.weights[0], t.weights[1], t.weights[2], t.weights[3]);
  const auto order = static_cast<std::size_t>(t.series_order);
  const ConnectionMatrix cm = connection_matrix(ode, order, t.precision);
  const Real tol(t.tolerance);
  // region-0 basis continued to z vs region-1 series times C
  const SolutionBases bases = solution_bases(ode, order);
  const NumericODE nod = to_numeric(ode);
  Real overlap = 0;
  for (const char* zs : {"0.4", "0.5", "0.6"}) {
    const Complex z{Real(zs)};
    const CMatrix lhs = local_basis_at(nod, bases.at0, z, t.precision, Real("1e-6"));
    const CMatrix rhs = series_matrix(bases.at1, z, Real("1e-6")) * cm.matrix;
    overlap = std::max(overlap, max_abs(lhs - rhs) / std::max(Real(1), max_abs(lhs)));
  }
  const CMatrix up = connection_matrix_via(ode, order, t.precision, Complex(Real("0.5"), Real("0.1")));
  const CMatrix down = connection_matrix_via(ode, order, t.precision, Complex(Real("0.5"), Real("-0.1")));
  const Real homotopy = std::max(max_abs(up - cm.matrix), max_abs(down - cm.matrix));
  const Real det = abs(determinant(cm.matrix));
  const bool ok_overlap = overlap <= tol, ok_h = homotopy <= tol, ok_det = det > tol;
  res.lines.push_back("overlap agreement at z in {0.4, 0.5, 0.6}: " + pass_fail(ok_overlap) + ", error " + sci(overlap));
  res.lines.push_back("homotopy independence (paths via 1/2 +- 0.1i): " + pass_fail(ok_h) + ", error " + sci(homotopy));
  res.lines.push_back("connection matrix invertible: " + pass_fail(ok_det) + ", |det| " + sci(det) + ", condition " + sci(cm.condition_number));
  res.pass = ok_overlap && ok_h && ok_det;
  io::ordered_json j = io::connection_json(cm);
  j["overlap_error"] = io::real_string(overlap, 6);
  j["homotopy_error"] = io::real_string(homotopy, 6);
  res.files.emplace_back("connect.json", j.dump(2) + "\n");
  return res;
}

struct MonodromyChecks {
  Real eigenphase_error, relation_error, braiding_error, contractible_error;
  MonodromyMatrix m0, m1, minf;
  CMatrix half;
};

inline MonodromyChecks monodromy_checks(const FuchsianODE& ode, std::size_t order, unsigned digits) {
  MonodromyChecks mc;
  mc.m0 = monodromy(ode, Loop::AroundZero, order, digits);
  mc.m1 = monodromy(ode, Loop::AroundOne, order, digits);
  mc.minf = monodromy(ode, Loop::AroundInfinity, order, digits);
  const std::size_t n = ode.dimension();
  mc.eigenphase_error = 0;
  for (const auto* mm : {&mc.m0, &mc.m1})
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const Complex expect = i == k ? phase(mm->exponents[i]) : Complex(0);
        mc.eigenphase_error = std::max(mc.eigenphase_error, abs(mm->matrix(i, k) - expect));
      }
  mc.relation_error = max_abs(mc.minf.transport * mc.m0.transport * mc.m1.transport - CMatrix::identity(n));
  mc.half = half_monodromy(ode, order, digits);
  mc.braiding_error = max_abs(mc.half * mc.half - mc.m1.matrix);
  Path loop(Complex(Real(1) / 2));
  loop.arc(Complex(Real("0.3"), Real("0.3")), Real(1), 24);
  mc.contractible_error = max_abs(transport(to_numeric(ode), loop, digits) - CMatrix::identity(n));
  return mc;
}

inline TaskResult run_monodromy(const ResolvedTask& t) {
  TaskResult res;
  const auto g = build_algebra_basis(build_cartan_data(t.algebra));
  res.header = "monodromy " + t.algebra + " k=" + t.level.get_str() + " weights=" + weights_string(t.weights);
  const FuchsianODE ode = reduce_four_point(g, t.level, t.weights[0], t.weights[1], t.weights[2], t.weights[3]);
  const MonodromyChecks mc = monodromy_checks(ode, static_cast<std::size_t>(t.series_order), t.precision);
  const Real tight("1e-10"), loose(t.tolerance);
  res.lines.push_back("contractible loop is identity: " + pass_fail(mc.contractible_error <= tight) + ", error " + sci(mc.contractible_error));
  res.lines.push_back("local monodromy is diag(e^{2 pi i r}): " + pass_fail(mc.eigenphase_error <= tight) + ", error " + sci(mc.eigenphase_error));
  res.lines.push_back("M_inf M_0 M_1 = 1: " + pass_fail(mc.relation_error <= loose) + ", error " + sci(mc.relation_error));
  res.lines.push_back("half-monodromy squared equals monodromy about 1 (commutativity): " + pass_fail(mc.braiding_error <= tight) + ", error " +
                      sci(mc.braiding_error));
  res.pass = mc.contractible_error <= tight && mc.eigenphase_error <= tight && mc.relation_error <= loose && mc.braiding_error <= tight;
  io::ordered_json j;
  j["around_0"] = io::monodromy_json(mc.m0, t.precision);
  j["around_1"] = io::monodromy_json(mc.m1, t.precision);
  j["around_infinity"] = io::monodromy_json(mc.minf, t.precision);
  j["half_monodromy_about_1"] = io::matrix_json(mc.half, t.precision);
  j["relation"] = "P_inf P_0 P_1 = 1 for transport matrices along loops based at 1/2";
  res.files.emplace_back("monodromy.json", j.dump(2) + "\n");
  return res;
}

inline TaskResult run_verify_assoc(const ResolvedTask& t) {
  TaskResult res;
  const auto g = build_algebra_basis(build_cartan_data(t.algebra));
  res.header = "verify-assoc " + t.algebra + " k=" + t.level.get_str() + " weights=" + weights_string(t.weights);
  const FuchsianODE ode = reduce_four_point(g, t.level, t.weights[0], t.weights[1], t.weights[2], t.weights[3]);
  const AssociativityReport ar = verify_associativity(ode, t.z1, t.z2, static_cast<std::size_t>(t.series_order), t.precision);
  const bool ok = ar.error <= Real(t.tolerance);
  res.lines.push_back("associativity of intertwining operators at z2/z1 = " + io::real_string(ar.z.re, 4) + (ar.z.im == 0 ? "" : "+" + io::real_string(ar.z.im, 4) + "i") +
                      ": " + pass_fail(ok) + ", error " + sci(ar.error));
  res.pass = ok;
  io::ordered_json j;
  j["z1"] = io::complex_json(t.z1, t.precision);
  j["z2"] = io::complex_json(t.z2, t.precision);
  j["ratio"] = io::complex_json(ar.z, t.precision);
  j["error"] = io::real_string(ar.error, 6);
  res.files.emplace_back("verify-assoc.json", j.dump(2) + "\n");
  return res;
}

inline TaskResult run_verify_npoint(const ResolvedTask& t) {
  TaskResult res;
  const auto g = build_algebra_basis(build_cartan_data(t.algebra));
  res.header = "verify-npoint " + t.algebra + " k=" + t.level.get_str() + " weights=" + weights_string(t.weights);
  const NPointSystem sys = npoint_system(g, t.level, t.weights);
  const NPointReport rep = verify_n_point(sys, t.points, static_cast<std::size_t>(t.series_order), t.precision);
  const bool ok = rep.convergent && rep.doubling_difference <= Real(t.tolerance);
  res.lines.push_back("product of " + std::to_string(sys.n) + " intertwining operators converges: " + pass_fail(ok) + ", tail ratio " +
                      io::real_string(rep.max_tail_ratio, 4) + ", order doubling difference " + sci(rep.doubling_difference));
  res.pass = ok;
  io::ordered_json j;
  io::ordered_json vals = io::ordered_json::array();
  for (const auto& v : rep.values) vals.push_back(io::vector_json(v, t.precision));
  j["u"] = io::vector_json(rep.u, t.precision);
  j["values"] = std::move(vals);
  std::vector<std::string> ratios;
  for (const auto& q : rep.tail_ratios) ratios.push_back(io::real_string(q, 6));
  j["tail_ratios"] = ratios;
  j["doubling_difference"] = io::real_string(rep.doubling_difference, 6);
  j["series_order"] = rep.order;
  res.files.emplace_back("verify-npoint.json", j.dump(2) + "\n");
  return res;
}

inline TaskResult run_task(const ResolvedTask& t) {
  try {
    if (t.kind == "voa-check") return run_voa_check(t);
    if (t.kind == "fuse") return run_fuse(t);
    if (t.kind == "blocks") return run_blocks(t);
    if (t.kind == "connect") return run_connect(t);
    if (t.kind == "monodromy") return run_monodromy(t);
    if (t.kind == "verify-assoc") return run_verify_assoc(t);
    if (t.kind == "verify-npoint") return run_verify_npoint(t);
    throw std::logic_error("unknown task kind");
  } catch (const std::exception& e) {
    TaskResult r;
    r.header = t.kind;
    r.lines.push_back(std::string("error: ") + e.what());
    r.pass = false;
    return r;
  }
}

struct RunOutcome {
  std::string summary;
  bool pass = true;
};

/// Runs all tasks and writes <out>/<NN>-<file> for every task output plus
/// <out>/summary.txt. Nothing is written when the task list is empty.
inline RunOutcome run(const RunConfig& cfg) {
  const auto tasks = resolve(cfg);
  RunOutcome outcome;
  if (tasks.empty()) return outcome;
  unsigned digits = cfg.precision;
  for (const auto& t : tasks) digits = std::max(digits, t.precision);
  PrecisionGuard guard(digits + 10);
  std::vector<TaskResult> results(tasks.size());
  if (cfg.parallel) {
    std::vector<std::future<TaskResult>> futs;
    for (const auto& t : tasks) futs.push_back(std::async(std::launch::async, [&t] { return run_task(t); }));
    for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
  } else {
    for (std::size_t i = 0; i < tasks.size(); ++i) results[i] = run_task(tasks[i]);
  }
  std::filesystem::create_directories(cfg.output);
  std::ostringstream summary;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    char prefix[32];
    std::snprintf(prefix, sizeof prefix, "%02zu", i + 1);
    summary << "[" << prefix << "] " << r.header << ": " << pass_fail(r.pass) << "\n";
    for (const auto& l : r.lines) summary << "  " << l << "\n";
    for (const auto& [name, content] : r.files) {
      std::ofstream f(std::filesystem::path(cfg.output) / (std::string(prefix) + "-" + name), std::ios::binary);
      f << content;
    }
    outcome.pass = outcome.pass && r.pass;
  }
  summary << "overall: " << pass_fail(outcome.pass) << "\n";
  outcome.summary = summary.str();
  std::ofstream(std::filesystem::path(cfg.output) / "summary.txt", std::ios::binary) << outcome.summary;
  return outcome;
}

}  // namespace wznw::cli

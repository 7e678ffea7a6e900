#pragma once

// JSON and CSV export. Rationals are written as ["num", "den"] string pairs,
// complex numbers as ["re", "im"] decimal strings at a fixed number of digits,
// so identical inputs give byte-identical files.

#include <json.hpp>

#include <sstream>
#include <string>
#include <vector>

#include "wznw/affinevoa.hpp"
#include "wznw/continuation.hpp"
#include "wznw/exact.hpp"
#include "wznw/kz.hpp"
#include "wznw/liealg.hpp"
#include "wznw/numeric.hpp"
#include "wznw/repn.hpp"

namespace wznw::io {

using nlohmann::ordered_json;

inline ordered_json rational_json(const Rational& q) { return ordered_json::array({q.get_num().get_str(), q.get_den().get_str()}); }

inline ordered_json rational_list_json(const std::vector<Rational>& v) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(rational_json(x));
  return a;
}

inline ordered_json matrix_json(const QMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(rational_json(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline std::string real_string(const Real& x, unsigned digits) {
  // fixed digits, and no negative zero
  if (x == 0) return Real(0).str(static_cast<std::streamsize>(digits), std::ios_base::scientific);
  return x.str(static_cast<std::streamsize>(digits), std::ios_base::scientific);
}

inline ordered_json complex_json(const Complex& z, unsigned digits) {
  return ordered_json::array({real_string(z.re, digits), real_string(z.im, digits)});
}

inline ordered_json matrix_json(const CMatrix& m, unsigned digits) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json r = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) r.push_back(complex_json(m(i, j), digits));
    rows.push_back(std::move(r));
  }
  return rows;
}

inline ordered_json vector_json(const CVector& v, unsigned digits) {
  ordered_json a = ordered_json::array();
  for (const auto& x : v) a.push_back(complex_json(x, digits));
  return a;
}

inline ordered_json cartan_json(const CartanData& cd) {
  ordered_json j;
  j["type"] = cd.type_label;
  j["rank"] = cd.rank;
  j["cartan_matrix"] = cd.cartan_matrix;
  j["positive_roots"] = cd.positive_roots;
  j["highest_root"] = cd.theta;
  j["dual_coxeter"] = rational_json(cd.dual_coxeter);
  return j;
}

inline ordered_json irrep_json(const Irrep& rep) {
  ordered_json j;
  j["highest_weight"] = rep.highest_weight;
  j["dimension"] = rep.dimension;
  j["weights"] = rep.weights;
  ordered_json acts = ordered_json::array();
  for (const auto& m : rep.action) acts.push_back(matrix_json(m));
  j["action"] = std::move(acts);
  j["gram"] = matrix_json(rep.gram);
  return j;
}

inline ordered_json residues_json(const FuchsianODE& ode) {
  ordered_json j;
  j["weights"] = ode.weights;
  j["level"] = rational_json(ode.level);
  j["kappa"] = rational_json(ode.kappa);
  j["carrier_dimension"] = ode.dimension();
  j["B0"] = matrix_json(ode.b0);
  j["B1"] = matrix_json(ode.b1);
  j["Binf"] = matrix_json(ode.b_infinity());
  return j;
}

/// One row per solution and carrier component:
/// base,exponent,component,c_0,...,c_M with entries written num/den.
inline std::string frobenius_csv(const std::vector<FrobeniusSolution>& sols) {
  std::ostringstream out;
  if (sols.empty()) return out.str();
  out << "base,exponent,component";
  for (std::size_t m = 0; m <= sols.front().order(); ++m) out << ",c_" << m;
  out << "\n";
  for (const auto& s : sols)
    for (std::size_t i = 0; i < s.coefficients.front().size(); ++i) {
      out << s.base_point << "," << s.exponent.get_str() << "," << i;
      for (const auto& c : s.coefficients) out << "," << c[i].get_str();
      out << "\n";
    }
  return out.str();
}

inline std::string graded_dimensions_csv(const std::vector<std::size_t>& dims) {
  std::ostringstream out;
  out << "depth,dimension\n";
  for (std::size_t d = 0; d < dims.size(); ++d) out << d << "," << dims[d] << "\n";
  return out.str();
}

inline ordered_json connection_json(const ConnectionMatrix& cm) {
  ordered_json j;
  j["source_basis"] = "Frobenius basis at z = 0";
  j["target_basis"] = "Frobenius basis at z = 1";
  j["branch"] = cm.branch;
  j["exponents_at_0"] = rational_list_json(cm.exponents0);
  j["exponents_at_1"] = rational_list_json(cm.exponents1);
  j["precision_digits"] = cm.digits;
  j["series_order"] = cm.series_order;
  j["matrix"] = matrix_json(cm.matrix, cm.digits);
  j["condition_number"] = real_string(cm.condition_number, 12);
  j["sample_error"] = real_string(cm.sample_error, 6);
  return j;
}

inline const char* loop_name(Loop l) {
  switch (l) {
    case Loop::AroundZero: return "around 0";
    case Loop::AroundOne: return "around 1";
    case Loop::AroundInfinity: return "around infinity";
  }
  return "";
}

inline ordered_json monodromy_json(const MonodromyMatrix& mm, unsigned digits) {
  ordered_json j;
  j["loop"] = loop_name(mm.loop);
  j["base_point"] = "1/2";
  j["basis"] = mm.basis_point == 0 ? "Frobenius basis at z = 0" : "Frobenius basis at z = 1";
  j["exponents"] = rational_list_json(mm.exponents);
  j["matrix"] = matrix_json(mm.matrix, digits);
  return j;
}

inline ordered_json extension_json(const ExtensionReport& er) {
  ordered_json j;
  j["N"] = er.n;
  ordered_json pairs = ordered_json::array();
  for (const auto& [r, s] : er.exponents) pairs.push_back({{"r", rational_json(r)}, {"s", rational_json(s)}});
  j["exponents"] = std::move(pairs);
  j["lowest_weight_sum"] = rational_json(er.wt_sum);
  j["blocks"] = er.blocks;
  j["logarithms"] = er.logarithms;
  j["status"] = er.status;
  j["overlap_error"] = real_string(er.overlap_error, 6);
  return j;
}

}  // namespace wznw::io

#pragma once

// JSON and CSV forms of expansions, spectra and reports. Extended-precision
// values are written as decimal strings that read back bit for bit; object
// fields keep a fixed order so identical inputs give identical bytes.

#include <json.hpp>
#include <sstream>
#include <string>

#include "spherespec/decay.hpp"
#include "spherespec/errors.hpp"
#include "spherespec/kernel_grammar.hpp"
#include "spherespec/kernels.hpp"
#include "spherespec/oracle.hpp"
#include "spherespec/spectra.hpp"

namespace spherespec {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json big_to_json(const BigInt& z) {
  if (z.fits_ulong_p()) return Json(z.get_ui());
  return Json(z.get_str());
}

template <typename T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json optional_to_json(const std::optional<Real>& v) { return v ? Json(v->to_decimal()) : Json(nullptr); }

}  // namespace detail

inline Json to_json(const LegendreExpansion& e) {
  Json coeffs = Json::array();
  for (const auto& c : e.coefficients()) coeffs.push_back(c.to_decimal());
  Json j;
  j["m"] = e.m();
  j["coeffs"] = std::move(coeffs);
  j["precision_bits"] = e.precision().bits;
  j["provenance"] = to_string(e.provenance());
  // After spectral multipliers, also carry the unrounded base values and exact
  // scales so a later inverse multiplier restores the original bits.
  bool scaled = false;
  for (std::size_t n = 0; n < e.size() && !scaled; ++n) scaled = e.scale(n) != 1;
  if (scaled) {
    Json base = Json::array(), scale = Json::array();
    for (std::size_t n = 0; n < e.size(); ++n) {
      base.push_back(e.base(n).to_decimal());
      scale.push_back(e.scale(n).get_str());
    }
    j["base"] = std::move(base);
    j["scale"] = std::move(scale);
  }
  return j;
}

/// Inverse of to_json(LegendreExpansion); malformed documents raise ParseError.
inline LegendreExpansion expansion_from_json(const Json& j) {
  try {
    const int m = j.at("m").get<int>();
    const unsigned bits = j.at("precision_bits").get<unsigned>();
    if (bits < 64) throw DomainError("expansion precision_bits must be >= 64");
    const Precision p{bits};
    const auto provenance = provenance_from_string(j.at("provenance").get<std::string>());
    std::vector<Real> c;
    if (j.contains("base")) {
      for (const auto& v : j.at("base")) c.push_back(Real::from_string(v.get<std::string>(), p));
      std::vector<Rational> scale;
      for (const auto& v : j.at("scale")) {
        Rational q;
        if (q.set_str(v.get<std::string>(), 10) != 0 || q.get_den() == 0) {
          throw ParseError("expansion JSON: bad scale '" + v.get<std::string>() + "'", 0);
        }
        q.canonicalize();
        scale.push_back(q);
      }
      if (scale.size() != c.size()) throw ParseError("expansion JSON: base and scale lengths differ", 0);
      return LegendreExpansion(m, std::move(c), provenance).with_multiplier([&](unsigned long n) { return scale[n]; });
    }
    for (const auto& v : j.at("coeffs")) c.push_back(Real::from_string(v.get<std::string>(), p));
    return LegendreExpansion(m, std::move(c), provenance);
  } catch (const Json::exception& ex) {
    throw ParseError(std::string("expansion JSON: ") + ex.what(), 0);
  }
}

inline LegendreExpansion expansion_from_json_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& ex) {
    throw ParseError(std::string("invalid JSON: ") + ex.what(), ex.byte);
  }
  return expansion_from_json(j);
}

/// Two columns: n, c_n.
inline std::string to_csv(const LegendreExpansion& e) {
  std::ostringstream os;
  os << "n,c_n\n";
  const auto c = e.coefficients();
  for (std::size_t n = 0; n < c.size(); ++n) os << n << ',' << c[n].to_decimal() << '\n';
  return os.str();
}

inline Json to_json(const Spectrum& s) {
  Json blocks = Json::array();
  for (const auto& b : s.blocks()) {
    Json o;
    o["level"] = b.level;
    o["value"] = b.value.to_decimal();
    o["multiplicity"] = detail::big_to_json(b.multiplicity);
    blocks.push_back(std::move(o));
  }
  Json j;
  j["m"] = s.m();
  j["blocks"] = std::move(blocks);
  return j;
}

/// Flattened rows (index, level, value) in the requested ordering.
inline std::string to_csv(const Spectrum& s, Ordering o = Ordering::sorted) {
  std::ostringstream os;
  os << "index,level,value\n";
  for (const auto& r : s.runs(o)) {
    const std::string v = r.value.to_decimal();
    for (BigInt k = r.first_index; k <= r.last_index(); ++k) os << k.get_str() << ',' << r.level << ',' << v << '\n';
  }
  return os.str();
}

inline Json to_json(const DecayReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    Json o;
    o["n"] = row.n;
    o["flat_index"] = detail::big_to_json(row.flat_index);
    o["lhs"] = row.lhs.to_decimal();
    o["rhs"] = row.rhs.to_decimal();
    o["ratio"] = row.ratio.to_decimal();
    o["bound_envelope"] = row.envelope.to_decimal();
    o["stirling_rhs"] = row.stirling_rhs.to_decimal();
    o["s1_level"] = row.s1_level;
    o["verdict"] = row.holds;
    rows.push_back(std::move(o));
  }
  Json j;
  j["m"] = r.m;
  j["delta"] = r.delta;
  j["stirling_c"] = r.stirling_c.to_decimal();
  j["all_hold"] = r.all_hold();
  j["rows"] = std::move(rows);
  return j;
}

inline std::string to_csv(const DecayReport& r) {
  std::ostringstream os;
  os << "n,flat_index,lhs,rhs,ratio,bound_envelope,verdict\n";
  for (const auto& row : r.rows) {
    os << row.n << ',' << row.flat_index.get_str() << ',' << row.lhs.to_decimal() << ',' << row.rhs.to_decimal()
       << ',' << row.ratio.to_decimal() << ',' << row.envelope.to_decimal() << ',' << (row.holds ? "true" : "false")
       << '\n';
  }
  return os.str();
}

inline Json to_json(const SeriesEvaluation& s) {
  Json cps = Json::array();
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
    Json o;
    o["index"] = s.checkpoints[i];
    o["partial_sum"] = s.partial_sums[i].to_decimal();
    o["term"] = s.term_values[i].to_decimal();
    cps.push_back(std::move(o));
  }
  Json j;
  j["exponent_spec"] = s.exponent;
  j["checkpoints"] = std::move(cps);
  j["verdict"] = to_string(s.verdict);
  j["reason"] = s.reason;
  j["tail_estimate"] = detail::optional_to_json(s.tail_estimate);
  j["window_start"] = detail::optional_to_json(s.window_start);
  j["first_term_above_one"] = detail::optional_to_json(s.first_term_above_one);
  return j;
}

/// Rows (index, term, partial_sum) for every index up to the last checkpoint.
inline std::string to_csv(const SeriesEvaluation& s) {
  std::ostringstream os;
  os << "index,term,partial_sum\n";
  Real partial(s.terms.empty() ? kDefaultPrecision : s.terms.front().precision());
  for (std::size_t k = 0; k < s.terms.size(); ++k) {
    partial += s.terms[k];
    os << (k + 1) << ',' << s.terms[k].to_decimal() << ',' << partial.to_decimal() << '\n';
  }
  return os.str();
}

inline Json to_json(const SpectrumComparison& c) {
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    Json o;
    o["index"] = r.index;
    o["numeric"] = r.numeric;
    o["analytic"] = r.analytic;
    o["relative_error"] = r.relative_error;
    rows.push_back(std::move(o));
  }
  Json clusters = Json::array();
  for (const auto& cl : c.clusters) {
    Json o;
    o["first_index"] = cl.first_index;
    o["size"] = cl.size;
    o["expected"] = cl.expected;
    o["level"] = cl.level;
    o["matches"] = cl.matches;
    clusters.push_back(std::move(o));
  }
  Json j;
  j["k"] = c.k;
  j["max_relative_error"] = c.max_relative_error;
  j["clusters_match"] = c.clusters_match;
  j["eigenvalues"] = std::move(rows);
  j["clusters"] = std::move(clusters);
  return j;
}

inline Json to_json(const OracleReport& r) {
  Json grid;
  grid["n_polar"] = r.n_polar;
  grid["n_azimuthal"] = r.n_azimuthal;
  grid["points"] = std::size_t{r.n_polar} * r.n_azimuthal;
  Json j;
  j["grid"] = std::move(grid);
  j["comparison"] = to_json(r.comparison);
  j["trace_numeric"] = r.trace_numeric;
  j["trace_analytic"] = r.trace_analytic;
  j["trace_relative_error"] = r.trace_relative_error;
  j["frobenius_numeric"] = r.frobenius_numeric;
  j["frobenius_analytic"] = r.frobenius_analytic;
  j["frobenius_relative_error"] = r.frobenius_relative_error;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["positivity"] = r.positivity;
  return j;
}

inline std::string to_csv(const OracleReport& r) {
  std::ostringstream os;
  os << "index,numeric,analytic,relative_error\n";
  os.precision(17);
  for (const auto& row : r.comparison.rows) {
    os << row.index << ',' << row.numeric << ',' << row.analytic << ',' << row.relative_error << '\n';
  }
  return os.str();
}

inline Json to_json(const std::vector<CatalogEntry>& cat) {
  Json arr = Json::array();
  for (const auto& e : cat) {
    Json o;
    o["name"] = e.name;
    o["syntax"] = e.syntax;
    o["parameters"] = e.parameters;
    arr.push_back(std::move(o));
  }
  Json j;
  j["families"] = std::move(arr);
  return j;
}

inline std::string to_csv(const std::vector<CatalogEntry>& cat) {
  std::ostringstream os;
  os << "name,syntax,parameters\n";
  auto quote = [](const std::string& s) { return '"' + s + '"'; };
  for (const auto& e : cat) os << e.name << ',' << quote(e.syntax) << ',' << quote(e.parameters) << '\n';
  return os.str();
}

}  // namespace spherespec

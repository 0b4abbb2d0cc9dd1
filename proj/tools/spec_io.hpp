#pragma once

// JSON state-spec documents.
//
//   {
//     "p": 0.1,
//     "factors": [
//       {"named": "max_ent", "d": 2},
//       {"named": "ghz", "dims": [2, 2, 2]},
//       {"named": "w", "n": 3},
//       {"named": "product", "dims": [2, 2]},
//       {"named": "random", "dims": [2, 3], "seed": 7},
//       {"schmidt": [0.8, 0.6], "dim": 3},
//       {"party_dims": [2, 2], "amplitudes": [[0.7071, 0], 0, 0, [0.7071, 0]]}
//     ]
//   }
//
// Amplitude entries are [re, im] pairs or bare reals.

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pptk/pptk.hpp"

namespace pptk::cli {

using json = nlohmann::ordered_json;

struct LoadedSpec {
  EnsembleSpec spec;
  bool has_p = false;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::size_t get_size(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing '" + key + "'");
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ParseError(where + ": '" + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

inline std::vector<std::size_t> get_dims(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).empty())
    throw ParseError(where + ": '" + key + "' must be a non-empty array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number_integer() || v.get<long long>() < 1)
      throw ParseError(where + ": '" + key + "' must be a non-empty array of positive integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

inline complex get_amplitude(const json& v, const std::string& where) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw ParseError(where + ": amplitude entries must be numbers or [re, im] pairs");
}

inline void warn_if_rescaled(double norm, const std::string& where, std::vector<std::string>& warnings) {
  if (std::abs(norm - 1.0) > 1e-6) {
    std::ostringstream os;
    os << where << ": amplitudes rescaled by 1/" << format_number(norm) << " to unit norm";
    warnings.push_back(os.str());
  }
}

}  // namespace detail

inline PureFactorState parse_factor(const json& j, const std::string& where, std::vector<std::string>& warnings) {
  if (!j.is_object()) throw ParseError(where + ": factor must be an object");
  if (j.contains("named")) {
    if (!j.at("named").is_string()) throw ParseError(where + ": 'named' must be a string");
    const auto name = j.at("named").get<std::string>();
    if (name == "max_ent") return max_entangled(detail::get_size(j, "d", where));
    if (name == "ghz") return ghz(detail::get_dims(j, "dims", where));
    if (name == "w") return w_state(detail::get_size(j, "n", where));
    if (name == "product") return product_state(detail::get_dims(j, "dims", where));
    if (name == "random") {
      const std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : 1;
      return random_pure(detail::get_dims(j, "dims", where), seed);
    }
    throw ParseError(where + ": unknown named state '" + name + "' (max_ent, ghz, w, product, random)");
  }
  if (j.contains("schmidt")) {
    const json& c = j.at("schmidt");
    if (!c.is_array() || c.empty()) throw ParseError(where + ": 'schmidt' must be a non-empty array");
    std::vector<double> coeffs;
    double sq = 0.0;
    for (const auto& v : c) {
      if (!v.is_number()) throw ParseError(where + ": Schmidt coefficients must be numbers");
      coeffs.push_back(v.get<double>());
      sq += coeffs.back() * coeffs.back();
    }
    const std::size_t dim = j.contains("dim") ? detail::get_size(j, "dim", where) : 0;
    if (dim != 0 && dim < coeffs.size()) throw ParseError(where + ": 'dim' is smaller than the number of coefficients");
    if (sq > 0.0) detail::warn_if_rescaled(std::sqrt(sq), where, warnings);
    return schmidt_state(coeffs, dim);
  }
  if (j.contains("party_dims")) {
    const auto dims = detail::get_dims(j, "party_dims", where);
    if (!j.contains("amplitudes") || !j.at("amplitudes").is_array())
      throw ParseError(where + ": 'amplitudes' array required with 'party_dims'");
    const json& a = j.at("amplitudes");
    const SubsystemShape shape(dims);
    if (a.size() != shape.total())
      throw ParseError(where + ": expected " + std::to_string(shape.total()) + " amplitudes, got " +
                       std::to_string(a.size()));
    ComplexVector v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = detail::get_amplitude(a[i], where);
    if (!v.allFinite()) throw ParseError(where + ": amplitudes must be finite");
    const double n = v.norm();
    if (n == 0.0) throw ParseError(where + ": amplitudes are all zero");
    detail::warn_if_rescaled(n, where, warnings);
    return PureFactorState::normalized(dims, v);
  }
  throw ParseError(where + ": factor needs one of 'named', 'schmidt', 'party_dims'");
}

inline LoadedSpec parse_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("spec: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("spec: top level must be an object");
  if (!doc.contains("factors") || !doc.at("factors").is_array() || doc.at("factors").empty())
    throw ParseError("spec: 'factors' must be a non-empty array");

  LoadedSpec out;
  try {
    std::size_t k = 0;
    for (const auto& f : doc.at("factors")) {
      out.spec.factors.push_back(parse_factor(f, "factor " + std::to_string(k), out.warnings));
      ++k;
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("spec: ") + e.what());
  }
  if (doc.contains("p")) {
    if (!doc.at("p").is_number()) throw ParseError("spec: 'p' must be a number");
    out.spec.p = doc.at("p").get<double>();
    out.has_p = true;
  }
  try {
    out.spec.validate();
  } catch (const PreconditionError& e) {
    throw ParseError(e.what());
  }
  return out;
}

inline LoadedSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("spec: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_spec(ss.str());
}

}  // namespace pptk::cli

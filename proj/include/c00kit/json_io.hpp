#pragma once

#include <string>

#include "c00kit/norms.hpp"
#include "c00kit/spreading.hpp"

// Wire formats. Rational scalars travel as "p/q" strings so round trips are
// exact and byte-stable; float scalars travel as JSON numbers. Ordinals use
// the CNF string grammar everywhere.
namespace c00 {

Rat rat_from_json(const Json& j);

inline Json scalar_to_json(const Rat& r) { return Json(format_rat(r)); }
inline Json scalar_to_json(double v) { return Json(v); }

template <class T>
T scalar_from_json(const Json& j) {
  if constexpr (scalar_traits<T>::exact) {
    return rat_from_json(j);
  } else {
    if (j.is_number()) return j.get<double>();
    return to_double(rat_from_json(j)); // "p/q" works in float mode too
  }
}

// {"entries": [[index, value], ...]}
template <class T>
Json vec_to_json(const Vec<T>& v) {
  Json entries = Json::array();
  for (const auto& [i, x] : v.entries) entries.push_back(Json::array({i, scalar_to_json(x)}));
  return Json{{"entries", std::move(entries)}};
}

template <class T>
Vec<T> vec_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
    throw ParseError("vector JSON needs an \"entries\" array");
  std::vector<std::pair<std::uint32_t, T>> raw;
  for (const auto& ent : j["entries"]) {
    if (!ent.is_array() || ent.size() != 2 || !ent[0].is_number_integer() ||
        ent[0].get<std::int64_t>() < 1)
      throw ParseError("vector entry must be [positive index, value]");
    raw.emplace_back(ent[0].get<std::uint32_t>(), scalar_from_json<T>(ent[1]));
  }
  return Vec<T>::from_entries(std::move(raw));
}

FinSet finset_from_json(const Json& j);
Json finset_to_json(const FinSet& e);

struct LoadedFamily {
  MaterializedFamily fam;
  bool closure_added = false; // hereditary closure introduced sets the file lacked
};

// {"universe": N, "sets": [[2,3],[4], ...], "label": "..."}; sets need not be
// subset-closed on disk — the loader closes them and reports if that added any.
LoadedFamily family_from_json(const Json& j);
Json family_to_json(const MaterializedFamily& f);

// Tagged union on "type": sup | ell1 | family | lift | tsirelson | azimi |
// mixed_z, e.g. {"type":"tsirelson","xi":"1","theta":"1/2"}.
NormExprPtr norm_from_json(const Json& j);
Json norm_to_json(const NormExpr& n);

template <class T>
Json functional_to_json(const Functional<T>& f) {
  Json terms = Json::array();
  for (const auto& [i, w] : f.terms) terms.push_back(Json::array({i, scalar_to_json(w)}));
  return Json{{"terms", std::move(terms)}, {"provenance", f.provenance}};
}

template <class T>
Functional<T> functional_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
    throw ParseError("functional JSON needs a \"terms\" array");
  Functional<T> f;
  for (const auto& ent : j["terms"]) {
    if (!ent.is_array() || ent.size() != 2 || !ent[0].is_number_integer() ||
        ent[0].get<std::int64_t>() < 1)
      throw ParseError("functional term must be [positive index, weight]");
    f.add_term(ent[0].get<std::uint32_t>(), scalar_from_json<T>(ent[1]));
  }
  f.finalize();
  f.provenance = j.contains("provenance") ? j["provenance"] : Json();
  return f;
}

template <class T>
Json certificate_to_json(const SpreadingCertificate<T>& c) {
  Json coeffs = Json::array();
  for (const auto& a : c.witness_coeffs) coeffs.push_back(scalar_to_json(a));
  return Json{{"delta", scalar_to_json(c.delta)},
              {"witness_E", finset_to_json(c.witness_E)},
              {"witness_coeffs", std::move(coeffs)},
              {"witness_functional", functional_to_json(c.witness_functional)},
              {"gap", c.gap}};
}

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

} // namespace c00

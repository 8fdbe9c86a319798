#include "c00kit/json_io.hpp"

#include <fstream>
#include <unordered_set>

namespace c00 {

namespace {

bool rat_literal_shape(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  if (digits == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '/') return false;
  ++i;
  digits = 0;
  while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
  return digits > 0 && i == s.size();
}

Ordinal ordinal_field(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ParseError(std::string("norm JSON needs \"") + key + "\" as an ordinal string");
  return Ordinal::parse(j[key].get<std::string>());
}

} // namespace

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<std::int64_t>());
  if (j.is_number())
    throw ParseError("non-integer numeric literals are not exact; write \"p/q\" instead");
  if (!j.is_string()) throw ParseError("rational value must be an integer or a \"p/q\" string");
  const auto s = j.get<std::string>();
  if (!rat_literal_shape(s)) throw ParseError("bad rational literal '" + s + "'");
  try {
    return Rat(s);
  } catch (const std::exception&) {
    throw ParseError("bad rational literal '" + s + "'");
  }
}

FinSet finset_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("set must be a JSON array of positive integers");
  std::vector<std::uint32_t> v;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<std::int64_t>() < 1)
      throw ParseError("set elements must be positive integers");
    v.push_back(x.get<std::uint32_t>());
  }
  return FinSet(std::move(v));
}

Json finset_to_json(const FinSet& e) {
  Json a = Json::array();
  for (std::uint32_t x : e.elements()) a.push_back(x);
  return a;
}

LoadedFamily family_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("universe") || !j["universe"].is_number_integer() ||
      j["universe"].get<std::int64_t>() < 0)
    throw ParseError("family JSON needs a nonnegative \"universe\"");
  if (!j.contains("sets") || !j["sets"].is_array())
    throw ParseError("family JSON needs a \"sets\" array");
  const auto universe = j["universe"].get<std::uint32_t>();
  std::string label = j.contains("label") ? j["label"].get<std::string>() : std::string();

  std::vector<FinSet> sets;
  std::unordered_set<std::uint64_t> given{FinSet().mask()};
  for (const auto& s : j["sets"]) {
    FinSet e = finset_from_json(s);
    if (!e.empty() && e.max() > universe)
      throw ParseError("family set " + e.str() + " exceeds universe " + std::to_string(universe));
    given.insert(e.mask());
    sets.push_back(std::move(e));
  }
  LoadedFamily out;
  out.fam = MaterializedFamily::from_sets(universe, std::move(sets), std::move(label), true);
  out.closure_added = out.fam.sets.size() > given.size();
  return out;
}

Json family_to_json(const MaterializedFamily& f) {
  Json sets = Json::array();
  for (const auto& e : f.sets) sets.push_back(finset_to_json(e));
  return Json{{"universe", f.universe}, {"label", f.label}, {"sets", std::move(sets)}};
}

NormExprPtr norm_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ParseError("norm JSON needs a \"type\" tag");
  const auto type = j["type"].get<std::string>();
  if (type == "sup") return NormExpr::sup();
  if (type == "ell1") return NormExpr::ell1();
  if (type == "family") {
    if (j.contains("schreier"))
      return NormExpr::family(
          FamilyRef::schreier_family(Ordinal::parse(j["schreier"].get<std::string>())));
    if (j.contains("family"))
      return NormExpr::family(FamilyRef::explicit_family(family_from_json(j["family"]).fam));
    throw ParseError("family norm needs \"schreier\" (ordinal) or \"family\" (explicit)");
  }
  if (type == "lift") {
    if (!j.contains("base")) throw ParseError("lift norm needs a \"base\"");
    NormExpr::Agg agg = NormExpr::Agg::sum;
    if (j.contains("agg")) {
      const auto a = j["agg"].get<std::string>();
      if (a == "sum")
        agg = NormExpr::Agg::sum;
      else if (a == "euclidean")
        agg = NormExpr::Agg::euclidean;
      else
        throw ParseError("unknown aggregator '" + a + "'");
    }
    Rat theta = j.contains("theta") ? rat_from_json(j["theta"]) : Rat(1);
    NormExpr::Outer outer = NormExpr::Outer::plain;
    if (j.contains("outer")) {
      const auto o = j["outer"].get<std::string>();
      if (o == "plain")
        outer = NormExpr::Outer::plain;
      else if (o == "max_with_c0")
        outer = NormExpr::Outer::max_with_c0;
      else
        throw ParseError("unknown outer mode '" + o + "'");
    }
    return NormExpr::lift(norm_from_json(j["base"]), ordinal_field(j, "k"), agg, std::move(theta),
                          outer);
  }
  if (type == "tsirelson") {
    if (!j.contains("theta")) throw ParseError("tsirelson norm needs \"theta\"");
    return NormExpr::tsirelson(ordinal_field(j, "xi"), rat_from_json(j["theta"]));
  }
  if (type == "azimi") {
    AlphaRule rule;
    if (j.contains("rule")) rule.name = j["rule"].get<std::string>();
    return NormExpr::azimi(std::move(rule));
  }
  if (type == "mixed_z") {
    ThetaRule rule;
    if (j.contains("rule")) {
      const Json& r = j["rule"];
      if (!r.is_object()) throw ParseError("mixed_z \"rule\" must be an object");
      if (r.contains("name")) rule.name = r["name"].get<std::string>();
      if (r.contains("first")) rule.first = rat_from_json(r["first"]);
      if (r.contains("ratio")) rule.ratio = rat_from_json(r["ratio"]);
    }
    return NormExpr::mixed_z(ordinal_field(j, "xi"), std::move(rule));
  }
  throw ParseError("unknown norm type '" + type + "'");
}

Json norm_to_json(const NormExpr& n) {
  switch (n.kind) {
    case NormExpr::Kind::sup:
      return Json{{"type", "sup"}};
    case NormExpr::Kind::ell1:
      return Json{{"type", "ell1"}};
    case NormExpr::Kind::family:
      if (n.family_ref.schreier) return Json{{"type", "family"}, {"schreier", n.family_ref.xi.str()}};
      return Json{{"type", "family"}, {"family", family_to_json(*n.family_ref.fam)}};
    case NormExpr::Kind::lift:
      return Json{{"type", "lift"},
                  {"base", norm_to_json(*n.base)},
                  {"k", n.param.str()},
                  {"agg", n.agg == NormExpr::Agg::sum ? "sum" : "euclidean"},
                  {"theta", format_rat(n.theta)},
                  {"outer", n.outer == NormExpr::Outer::plain ? "plain" : "max_with_c0"}};
    case NormExpr::Kind::tsirelson:
      return Json{{"type", "tsirelson"}, {"xi", n.param.str()}, {"theta", format_rat(n.theta)}};
    case NormExpr::Kind::azimi:
      return Json{{"type", "azimi"}, {"rule", n.alpha_rule.name}};
    case NormExpr::Kind::mixed_z:
      return Json{{"type", "mixed_z"},
                  {"xi", n.param.str()},
                  {"rule",
                   Json{{"name", n.theta_rule.name},
                        {"first", format_rat(n.theta_rule.first)},
                        {"ratio", format_rat(n.theta_rule.ratio)}}}};
  }
  throw InternalError("unhandled norm kind");
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ParseError("bad JSON in '" + path + "': " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

} // namespace c00

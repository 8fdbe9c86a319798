#pragma once

// Implementation detail of norms.hpp (included from there). Re-derives a
// functional's linear action from its provenance, checking along the way that
// the described structure is admissible for the norm in question, and then
// compares against the stated terms and (optionally) a claimed value.
// Outcome codes: "malformed" for shape problems (missing or mistyped fields,
// unknown kinds, kinds that do not apply to the norm), "mismatch" for
// structurally sound certificates that fail a semantic check (inadmissible
// sets, wrong weights, terms or value that disagree with the derivation).

namespace c00 {
namespace normdetail {

struct MalformedWitness {
  std::string why;
};
struct MismatchWitness {
  std::string why;
};

inline void shape(bool c, const std::string& why) {
  if (!c) throw MalformedWitness{why};
}
inline void semantic(bool c, const std::string& why) {
  if (!c) throw MismatchWitness{why};
}

inline bool uint_like(const Json& j) {
  return j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0);
}

inline std::vector<Interval> parse_intervals(const Json& j) {
  shape(j.is_array() && !j.empty(), "intervals must be a nonempty array");
  std::vector<Interval> out;
  std::uint32_t prev_hi = 0;
  for (const auto& e : j) {
    shape(e.is_array() && e.size() == 2 && uint_like(e[0]) && uint_like(e[1]),
          "interval entries must be [lo, hi] with positive integers");
    std::uint32_t lo = e[0].get<std::uint32_t>(), hi = e[1].get<std::uint32_t>();
    shape(lo >= 1 && lo <= hi, "interval bounds must satisfy 1 <= lo <= hi");
    shape(lo > prev_hi, "intervals must be successive");
    prev_hi = hi;
    out.push_back({lo, hi});
  }
  return out;
}

inline int parse_sign(const Json& j) {
  shape(j.is_number_integer(), "signs must be integers");
  int s = j.get<int>();
  shape(s == 1 || s == -1, "signs must be +1 or -1");
  return s;
}

inline FinSet interval_minima(const std::vector<Interval>& iv) {
  std::vector<std::uint32_t> mins;
  for (const auto& i : iv) mins.push_back(i.lo);
  return FinSet{std::move(mins)};
}

template <class T>
using TermMap = std::map<std::uint32_t, T>;

template <class T>
TermMap<T> derive(const NormExpr& n, const Json& prov) {
  shape(prov.is_object() && prov.contains("kind") && prov["kind"].is_string(),
        "certificate must be an object with a string kind");
  const std::string kind = prov["kind"].get<std::string>();
  using K = NormExpr::Kind;

  if (kind == "zero") return {};

  if (kind == "coordinate") {
    bool allowed = n.kind == K::sup || n.kind == K::tsirelson || n.kind == K::mixed_z ||
                   (n.kind == K::lift && n.outer == NormExpr::Outer::max_with_c0);
    shape(allowed, "coordinate certificates do not apply to " + n.describe());
    shape(prov.contains("index") && uint_like(prov["index"]),
          "coordinate certificate needs an index");
    std::uint32_t idx = prov["index"].get<std::uint32_t>();
    shape(idx >= 1, "indices start at 1");
    int s = parse_sign(prov.at("sign"));
    return {{idx, T(s)}};
  }

  if (kind == "family_set") {
    shape(n.kind == K::ell1 || n.kind == K::family,
          "set certificates do not apply to " + n.describe());
    shape(prov.contains("set") && prov["set"].is_array() && !prov["set"].empty(),
          "set certificate needs a nonempty index array");
    shape(prov.contains("signs") && prov["signs"].is_array() &&
              prov["signs"].size() == prov["set"].size(),
          "signs must match the set element-wise");
    std::vector<std::uint32_t> idx;
    for (const auto& e : prov["set"]) {
      shape(uint_like(e) && e.get<std::uint32_t>() >= 1, "set entries must be indices");
      idx.push_back(e.get<std::uint32_t>());
    }
    shape(std::is_sorted(idx.begin(), idx.end()) &&
              std::adjacent_find(idx.begin(), idx.end()) == idx.end(),
          "set entries must be strictly increasing");
    FinSet e{std::vector<std::uint32_t>(idx)};
    if (n.kind == K::family)
      semantic(n.family_ref.contains(e), "set is not a member of the family");
    TermMap<T> out;
    for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = T(parse_sign(prov["signs"][i]));
    return out;
  }

  if (kind == "split") {
    shape((n.kind == K::lift && n.agg == NormExpr::Agg::sum) || n.kind == K::tsirelson,
          "split certificates do not apply to " + n.describe());
    shape(prov.contains("theta") && prov["theta"].is_string(), "split certificate needs a theta");
    semantic(parse_rat(prov["theta"].get<std::string>()) == n.theta,
             "split weight differs from the norm's theta");
    auto iv = parse_intervals(prov.at("intervals"));
    shape(prov.contains("children") && prov["children"].is_array() &&
              prov["children"].size() == iv.size(),
          "children must match the intervals element-wise");
    semantic(schreier_contains(n.param, interval_minima(iv)),
             "interval minima are not admissible");
    const NormExpr& child_norm = n.kind == K::lift ? *n.base : n;
    const T theta = scalar_traits<T>::from_rat(n.theta);
    TermMap<T> out;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      TermMap<T> ct = derive<T>(child_norm, prov["children"][i]);
      for (const auto& [j, c] : ct) {
        semantic(j >= iv[i].lo && j <= iv[i].hi, "child acts outside its interval");
        out[j] += theta * c;
      }
    }
    return out;
  }

  if (kind == "euclidean") {
    shape(n.kind == K::lift && n.agg == NormExpr::Agg::euclidean,
          "euclidean certificates do not apply to " + n.describe());
    if constexpr (scalar_traits<T>::exact)
      throw MalformedWitness{"euclidean certificates apply to float mode only"};
    shape(prov.contains("theta") && prov["theta"].is_string(), "certificate needs a theta");
    semantic(parse_rat(prov["theta"].get<std::string>()) == n.theta,
             "weight differs from the norm's theta");
    auto iv = parse_intervals(prov.at("intervals"));
    shape(prov.contains("children") && prov["children"].is_array() &&
              prov["children"].size() == iv.size(),
          "children must match the intervals element-wise");
    shape(prov.contains("weights") && prov["weights"].is_array() &&
              prov["weights"].size() == iv.size(),
          "weights must match the intervals element-wise");
    semantic(schreier_contains(n.param, interval_minima(iv)),
             "interval minima are not admissible");
    const T theta = scalar_traits<T>::from_rat(n.theta);
    T wsq(0);
    TermMap<T> out;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      shape(prov["weights"][i].is_number(), "weights must be numbers");
      T w = prov["weights"][i].get<double>();
      semantic(w >= T(0), "weights must be nonnegative");
      wsq += w * w;
      TermMap<T> ct = derive<T>(*n.base, prov["children"][i]);
      for (const auto& [j, c] : ct) {
        semantic(j >= iv[i].lo && j <= iv[i].hi, "child acts outside its interval");
        out[j] += theta * w * c;
      }
    }
    semantic(wsq <= T(1) + T(1e-9), "euclidean weights exceed the unit ball");
    return out;
  }

  if (kind == "azimi") {
    shape(n.kind == K::azimi, "weighted-interval certificates do not apply to " + n.describe());
    shape(prov.contains("rule") && prov["rule"].is_string(), "certificate needs a weight rule");
    semantic(prov["rule"].get<std::string>() == n.alpha_rule.name,
             "weight rule differs from the norm's rule");
    auto iv = parse_intervals(prov.at("intervals"));
    shape(prov.contains("signs") && prov["signs"].is_array() && prov["signs"].size() == iv.size(),
          "signs must match the intervals element-wise");
    TermMap<T> out;
    for (std::size_t k = 0; k < iv.size(); ++k) {
      int s = parse_sign(prov["signs"][k]);
      T coef = T(s) * scalar_traits<T>::from_rat(n.alpha_rule.alpha(static_cast<std::uint32_t>(k + 1)));
      for (std::uint32_t j = iv[k].lo; j <= iv[k].hi; ++j) out[j] += coef;
    }
    return out;
  }

  if (kind == "mixed") {
    shape(n.kind == K::mixed_z, "mixed certificates do not apply to " + n.describe());
    if constexpr (scalar_traits<T>::exact) {
      throw MalformedWitness{"mixed certificates apply to float mode only"};
    } else {
      shape(n.param.is_finite() && n.param.finite_value() >= 1, "mixed norm scale must be finite");
      const std::uint32_t k = static_cast<std::uint32_t>(n.param.finite_value());
      shape(prov.contains("stage_cut") && uint_like(prov["stage_cut"]),
            "certificate needs a stage cut");
      const int m = prov["stage_cut"].get<int>();
      shape(m >= 1 && m <= 4096, "stage cut out of range");
      shape(prov.contains("self_discount") && prov["self_discount"].is_number(),
            "certificate needs a self discount");
      double d = prov["self_discount"].get<double>();
      shape(prov.contains("active") && prov["active"].is_array(), "certificate needs an active list");
      shape(prov.contains("stages") && prov["stages"].is_array(), "certificate needs stages");
      shape(prov.contains("tail") && prov["tail"].is_object(), "certificate needs a tail");

      auto theta = [&](int i) { return to_double(n.theta_rule.theta(static_cast<std::uint32_t>(i))); };
      auto stage_ordinal = [&](int i) {
        return Ordinal::omega_power(k).fundamental(static_cast<std::uint32_t>(i));
      };

      double dsum = 0;
      std::vector<int> active;
      for (const auto& e : prov["active"]) {
        shape(uint_like(e), "active entries must be stage numbers");
        int a = e.get<int>();
        shape(a >= 1 && a <= m, "active stages must lie below the cut");
        shape(std::find(active.begin(), active.end(), a) == active.end(),
              "active stages must be distinct");
        active.push_back(a);
        dsum += theta(a) * theta(a);
      }
      semantic(std::fabs(dsum - d) <= 1e-12 * std::max(1.0, dsum),
               "self discount does not match the active stages");
      semantic(d < 1.0, "self discount must stay below one");

      double ball = d;
      TermMap<T> out;
      std::vector<int> seen;
      for (const auto& st : prov["stages"]) {
        shape(st.is_object() && st.contains("n") && uint_like(st["n"]) &&
                  st.contains("weight") && st["weight"].is_number() && st.contains("child"),
              "stage entries need n, weight and child");
        int sn = st["n"].get<int>();
        shape(sn >= 1 && sn <= m, "stage numbers must lie below the cut");
        shape(std::find(seen.begin(), seen.end(), sn) == seen.end(), "stage numbers must be distinct");
        shape(std::find(active.begin(), active.end(), sn) == active.end(),
              "active stages cannot also carry an expansion");
        seen.push_back(sn);
        double w = st["weight"].get<double>();
        semantic(w >= 0, "stage weights must be nonnegative");
        const Json& child = st["child"];
        shape(child.is_object() && child.contains("kind") && child["kind"].is_string() &&
                  child["kind"].get<std::string>() == "split",
              "stage children must be split certificates");
        shape(child.contains("theta") && child["theta"].is_string(), "stage child needs a theta");
        semantic(parse_rat(child["theta"].get<std::string>()) ==
                     n.theta_rule.theta(static_cast<std::uint32_t>(sn)),
                 "stage child weight differs from the stage's theta");
        auto iv = parse_intervals(child.at("intervals"));
        shape(child.contains("children") && child["children"].is_array() &&
                  child["children"].size() == iv.size(),
              "stage child blocks must match the intervals element-wise");
        semantic(schreier_contains(stage_ordinal(sn), interval_minima(iv)),
                 "stage interval minima are not admissible");
        for (std::size_t i = 0; i < iv.size(); ++i) {
          TermMap<T> ct = derive<T>(n, child["children"][i]);
          for (const auto& [j, c] : ct) {
            semantic(j >= iv[i].lo && j <= iv[i].hi, "stage block acts outside its interval");
            out[j] += T(w) * T(theta(sn)) * c;
          }
        }
        ball += (w * (1.0 - d)) * (w * (1.0 - d));
      }

      const Json& tail = prov["tail"];
      shape(tail.contains("weight") && tail["weight"].is_number() && tail.contains("signs") &&
                tail["signs"].is_array(),
            "tail needs a weight and signs");
      double wt = tail["weight"].get<double>();
      semantic(wt >= 0, "tail weight must be nonnegative");
      double tau = to_double(n.theta_rule.tail_sq_sum(static_cast<std::uint32_t>(m)));
      std::vector<std::uint32_t> tidx;
      for (const auto& e : tail["signs"]) {
        shape(e.is_array() && e.size() == 2 && uint_like(e[0]),
              "tail signs must be [index, sign] pairs");
        std::uint32_t j = e[0].get<std::uint32_t>();
        shape(j >= 1 && (tidx.empty() || j > tidx.back()), "tail indices must be strictly increasing");
        tidx.push_back(j);
        out[j] += T(wt) * T(parse_sign(e[1]));
      }
      if (!tidx.empty() && wt > 0)
        semantic(schreier_contains(stage_ordinal(m + 1), FinSet{std::move(tidx)}),
                 "tail support is not admissible past the cut");
      ball += (wt * (1.0 - d)) * (wt * (1.0 - d)) / tau;
      semantic(ball <= 1.0 + 1e-9, "certificate exceeds the dual ball");
      return out;
    }
  }

  throw MalformedWitness{"unknown certificate kind '" + kind + "'"};
}

} // namespace normdetail

template <class T>
VerifyOutcome verify_witness(const NormExpr& n, const Vec<T>& x, const Functional<T>& f,
                             const std::optional<T>& claimed = std::nullopt) {
  using namespace normdetail;
  try {
    n.validate();
    TermMap<T> want = derive<T>(n, f.provenance);
    TermMap<T> got;
    for (const auto& [i, c] : f.terms) {
      if (i < 1) return {false, "malformed", "term indices start at 1"};
      got[i] += c;
    }
    for (const auto& [i, c] : want)
      if (!close(got.count(i) ? got.at(i) : T(0), c))
        return {false, "mismatch", "stated terms differ from the certificate at index " +
                                       std::to_string(i)};
    for (const auto& [i, c] : got)
      if (!want.count(i) && !close(c, T(0)))
        return {false, "mismatch",
                "stated terms differ from the certificate at index " + std::to_string(i)};
    if (claimed && !close(f.apply(x), *claimed))
      return {false, "mismatch", "claimed value is not the certificate's action on the vector"};
    return {true, "ok", ""};
  } catch (const MalformedWitness& e) {
    return {false, "malformed", e.why};
  } catch (const MismatchWitness& e) {
    return {false, "mismatch", e.why};
  } catch (const ParseError& e) {
    return {false, "malformed", std::string("bad scalar in certificate: ") + e.what()};
  } catch (const Json::exception& e) {
    return {false, "malformed", std::string("bad certificate shape: ") + e.what()};
  }
}

template <class T>
VerifyOutcome verify_witness(const NormExprPtr& n, const Vec<T>& x, const Functional<T>& f,
                             const std::optional<T>& claimed = std::nullopt) {
  return verify_witness<T>(*n, x, f, claimed);
}

} // namespace c00

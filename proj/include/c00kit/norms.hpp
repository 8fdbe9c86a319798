#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "c00kit/errors.hpp"
#include "c00kit/families.hpp"
#include "c00kit/norm_expr.hpp"
#include "c00kit/rational.hpp"
#include "c00kit/vector.hpp"

namespace c00 {

using Json = nlohmann::ordered_json;

struct Interval {
  std::uint32_t lo = 0, hi = 0; // 1 <= lo <= hi
};

// A linear functional with a certificate of how it was built. Provenance is a
// small JSON tree; the verifier re-derives the linear action from it and
// checks admissibility of the described structure. Kinds:
//   {"kind":"zero"}
//   {"kind":"coordinate","index":i,"sign":s}                    s in {-1,1}
//   {"kind":"family_set","set":[..],"signs":[..]}               sum of s_j e_j*
//   {"kind":"split","theta":"p/q","intervals":[[lo,hi],..],
//    "children":[..]}                                           theta * sum of children
//   {"kind":"euclidean","theta":"p/q","intervals":[..],
//    "weights":[..],"children":[..]}                            theta * sum w_i child_i
//   {"kind":"azimi","rule":name,"intervals":[..],"signs":[..]}  sum s_i a_i sum_{j in I_i} e_j*
//   {"kind":"mixed","stage_cut":m,"self_discount":d,"active":[..],
//    "stages":[{"n":..,"weight":..,"child":{split}},..],
//    "tail":{"weight":..,"signs":[[j,s],..]}}                   see the mixed engine
template <class T>
struct Functional {
  std::vector<std::pair<std::uint32_t, T>> terms; // sorted by index, nonzero
  Json provenance = Json{{"kind", "zero"}};

  T apply(const Vec<T>& x) const {
    T s(0);
    for (const auto& [i, c] : terms) s += c * x.at(i);
    return s;
  }

  void add_term(std::uint32_t i, const T& c) {
    for (auto& [j, v] : terms)
      if (j == i) {
        v += c;
        return;
      }
    terms.emplace_back(i, c);
  }

  void finalize() {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    terms.erase(std::remove_if(terms.begin(), terms.end(),
                               [](const auto& t) { return t.second == T(0); }),
                terms.end());
  }
};

template <class T>
struct EvalResult {
  T value{};
  Functional<T> witness;
};

struct VerifyOutcome {
  bool ok = false;
  std::string code;   // "ok" | "malformed" | "mismatch"
  std::string reason; // empty when ok
};

namespace normdetail {

template <class T>
Json scalar_json(const T& v) {
  if constexpr (scalar_traits<T>::exact)
    return Json(format_rat(v));
  else
    return Json(v);
}

template <class T>
int sign_of(const T& v) {
  return v < T(0) ? -1 : 1;
}

template <class T>
bool close(const T& a, const T& b) {
  if constexpr (scalar_traits<T>::exact) {
    return a == b;
  } else {
    double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    return std::fabs(a - b) <= 1e-12 * scale;
  }
}

template <class T>
EvalResult<T> zero_result() {
  return {};
}

// ---------------------------------------------------------------------------
// sup and ell1

template <class T>
EvalResult<T> eval_sup(const Vec<T>& x) {
  if (x.is_zero()) return zero_result<T>();
  std::uint32_t best_i = 0;
  T best(0);
  for (const auto& [i, v] : x.entries) {
    T a = scalar_traits<T>::abs(v);
    if (a > best) {
      best = a;
      best_i = i;
    }
  }
  EvalResult<T> r;
  r.value = best;
  int s = sign_of(x.at(best_i));
  r.witness.terms = {{best_i, T(s)}};
  r.witness.provenance = Json{{"kind", "coordinate"}, {"index", best_i}, {"sign", s}};
  return r;
}

template <class T>
EvalResult<T> eval_ell1(const Vec<T>& x) {
  if (x.is_zero()) return zero_result<T>();
  EvalResult<T> r;
  Json set = Json::array(), signs = Json::array();
  for (const auto& [i, v] : x.entries) {
    int s = sign_of(v);
    r.value += scalar_traits<T>::abs(v);
    r.witness.terms.emplace_back(i, T(s));
    set.push_back(i);
    signs.push_back(s);
  }
  r.witness.provenance = Json{{"kind", "family_set"}, {"set", set}, {"signs", signs}};
  return r;
}

// ---------------------------------------------------------------------------
// family norm: sup over E in F of the absolute coordinate sum. Depth-first
// search in lexicographic set order with two prunes: heredity (a prefix
// outside F has no admissible extension) and the remaining-mass bound. Strict
// improvement keeps the lexicographically first maximizer.

template <class T>
EvalResult<T> eval_family(const NormExpr& n, const Vec<T>& x) {
  const FamilyRef& F = n.family_ref;
  if (x.is_zero()) return zero_result<T>();
  if (!F.schreier && x.max_index() > F.fam->universe)
    throw ConfigError("vector support exceeds the family universe " +
                      std::to_string(F.fam->universe));
  const auto& es = x.entries;
  const std::size_t p = es.size();
  std::vector<T> tail(p + 1, T(0));
  for (std::size_t i = p; i-- > 0;) tail[i] = tail[i + 1] + scalar_traits<T>::abs(es[i].second);

  T best(0);
  std::vector<std::uint32_t> best_set, cur;
  auto rec = [&](auto&& self, std::size_t from, const FinSet& prefix, const T& sum) -> void {
    if (sum > best) {
      best = sum;
      best_set = cur;
    }
    for (std::size_t j = from; j < p; ++j) {
      if (sum + tail[j] <= best) break; // later starts have even less mass
      FinSet next = prefix.with(es[j].first);
      if (!F.contains(next)) continue;
      cur.push_back(es[j].first);
      self(self, j + 1, next, sum + scalar_traits<T>::abs(es[j].second));
      cur.pop_back();
    }
  };
  rec(rec, 0, FinSet(), T(0));

  EvalResult<T> r;
  r.value = best;
  if (best_set.empty()) return r; // seminorm case: nothing admissible meets the support
  Json set = Json::array(), signs = Json::array();
  for (std::uint32_t i : best_set) {
    int s = sign_of(x.at(i));
    r.witness.terms.emplace_back(i, T(s));
    set.push_back(i);
    signs.push_back(s);
  }
  r.witness.provenance = Json{{"kind", "family_set"}, {"set", set}, {"signs", signs}};
  return r;
}

// ---------------------------------------------------------------------------
// interval decomposition DP, shared by the lift engines and (per range) by
// the fixed-point norms. Values are supplied per position range; intervals
// are identified with support position ranges (shrinking an interval to its
// support endpoints keeps the content and only raises the minima, which
// spreading families tolerate). State: next position x admissibility tracker.

template <class T>
struct SplitDP {
  const std::vector<std::uint32_t>* pos;       // support indices
  std::size_t lo = 0, hi = 0;                  // inclusive position range
  const std::function<T(std::size_t, std::size_t)>* piece; // value of [a..b]
  bool skip_full_single = false;               // drop the single full-range interval
  std::map<std::pair<std::size_t, std::string>, T> memo;

  T best(std::size_t i, const AdmissibilityTracker& t) {
    if (i > hi) return T(0);
    auto key = std::make_pair(i, t.key());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    T b = best(i + 1, t); // leave position i uncovered
    if (auto t2 = t.pushed((*pos)[i])) {
      for (std::size_t j = i; j <= hi; ++j) {
        if (skip_full_single && i == lo && j == hi && !t.started()) continue;
        T v = (*piece)(i, j) + best(j + 1, *t2);
        if (v > b) b = v;
      }
    }
    return memo.emplace(std::move(key), std::move(b)).first->second;
  }

  // canonical maximizer: earliest start, then shortest interval, skip last
  void reconstruct(std::size_t i, const AdmissibilityTracker& t, const T& need,
                   std::vector<std::pair<std::size_t, std::size_t>>& out) {
    if (i > hi) return;
    if (auto t2 = t.pushed((*pos)[i])) {
      for (std::size_t j = i; j <= hi; ++j) {
        if (skip_full_single && i == lo && j == hi && !t.started()) continue;
        T rest = best(j + 1, *t2);
        if ((*piece)(i, j) + rest == need) {
          out.emplace_back(i, j);
          reconstruct(j + 1, *t2, rest, out);
          return;
        }
      }
    }
    // no start matches, so skipping must
    reconstruct(i + 1, t, need, out);
  }
};

template <class T>
EvalResult<T> eval(const NormExpr& n, const Vec<T>& x);

template <class T>
EvalResult<T> eval_lift(const NormExpr& n, const Vec<T>& x) {
  if (x.is_zero()) return zero_result<T>();
  const bool euclid = n.agg == NormExpr::Agg::euclidean;
  std::vector<std::uint32_t> pos = x.support().elements();
  const std::size_t p = pos.size();
  if (!n.param.is_finite() && p > universe_cap())
    throw ResourceError("support size exceeds the cap for transfinite admissibility");
  const T theta = scalar_traits<T>::from_rat(n.theta);

  std::map<std::pair<std::size_t, std::size_t>, EvalResult<T>> pieces;
  auto base_piece = [&](std::size_t a, std::size_t b) -> const EvalResult<T>& {
    auto key = std::make_pair(a, b);
    auto it = pieces.find(key);
    if (it == pieces.end())
      it = pieces.emplace(key, normdetail::eval<T>(*n.base, x.restrict_to(pos[a], pos[b]))).first;
    return it->second;
  };
  std::function<T(std::size_t, std::size_t)> piece = [&](std::size_t a, std::size_t b) -> T {
    const T& v = base_piece(a, b).value;
    return euclid ? T(v * v) : v;
  };

  SplitDP<T> dp{&pos, 0, p - 1, &piece, false, {}};
  const AdmissibilityTracker root{n.param};
  T raw = dp.best(0, root);

  T lifted;
  if constexpr (scalar_traits<T>::exact) {
    lifted = theta * raw; // euclidean aggregation never reaches exact mode
  } else {
    lifted = euclid ? theta * std::sqrt(raw) : theta * raw;
  }

  EvalResult<T> r;
  const T peak = x.linf();
  if (n.outer == NormExpr::Outer::max_with_c0 && peak > lifted) {
    r.value = peak;
    r.witness = eval_sup(x).witness; // coordinate certificate
    return r;
  }

  r.value = lifted;
  std::vector<std::pair<std::size_t, std::size_t>> chosen;
  dp.reconstruct(0, root, raw, chosen);
  Json intervals = Json::array(), children = Json::array(), weights = Json::array();
  for (auto [a, b] : chosen) {
    const EvalResult<T>& pc = base_piece(a, b);
    intervals.push_back(Json::array({pos[a], pos[b]}));
    children.push_back(pc.witness.provenance);
    T w(1);
    if (euclid) {
      if constexpr (!scalar_traits<T>::exact) w = raw > 0 ? pc.value / std::sqrt(raw) : T(0);
      weights.push_back(scalar_json(w));
    }
    for (const auto& [i, c] : pc.witness.terms) r.witness.add_term(i, T(theta * w * c));
  }
  r.witness.finalize();
  if (euclid)
    r.witness.provenance = Json{{"kind", "euclidean"},
                                {"theta", format_rat(n.theta)},
                                {"intervals", intervals},
                                {"weights", weights},
                                {"children", children}};
  else
    r.witness.provenance = Json{{"kind", "split"},
                                {"theta", format_rat(n.theta)},
                                {"intervals", intervals},
                                {"children", children}};
  return r;
}

// ---------------------------------------------------------------------------
// Tsirelson: V = max(sup-norm, theta * best admissible split into intervals),
// solved per support range by iterating from the sup norm until a whole pass
// changes nothing. Ranges are processed by size, so the first pass already
// lands on the fixed point and the second confirms stationarity; the update
// is monotone because every quantity on the right is.

template <class T>
struct TsirelsonEngine {
  const NormExpr* n;
  const Vec<T>* x;
  std::vector<std::uint32_t> pos;
  std::size_t p = 0;
  T theta;
  std::map<std::pair<std::size_t, std::size_t>, T> table;

  T peak(std::size_t a, std::size_t b) const {
    T m(0);
    for (std::size_t i = a; i <= b; ++i) {
      T v = scalar_traits<T>::abs(x->at(pos[i]));
      if (v > m) m = v;
    }
    return m;
  }

  T split_best(std::size_t a, std::size_t b,
               std::vector<std::pair<std::size_t, std::size_t>>* out = nullptr) {
    std::function<T(std::size_t, std::size_t)> piece = [&](std::size_t i, std::size_t j) -> T {
      return table.at(std::make_pair(i, j));
    };
    SplitDP<T> dp{&pos, a, b, &piece, false, {}};
    const AdmissibilityTracker root{n->param};
    T raw = dp.best(a, root);
    if (out) dp.reconstruct(a, root, raw, *out);
    return raw;
  }

  void run() {
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = a; b < p; ++b) table[{a, b}] = peak(a, b);
    for (std::size_t pass = 0; pass <= p + 1; ++pass) {
      bool changed = false;
      for (std::size_t len = 1; len <= p; ++len) {
        for (std::size_t a = 0; a + len <= p; ++a) {
          std::size_t b = a + len - 1;
          T cand = std::max(peak(a, b), T(theta * split_best(a, b)));
          T& slot = table[{a, b}];
          if (cand != slot) {
            if (cand < slot) throw InternalError("tsirelson iteration decreased a value");
            slot = cand;
            changed = true;
          }
        }
      }
      if (!changed) return;
    }
    throw InternalError("tsirelson iteration failed to stabilize");
  }

  Functional<T> witness(std::size_t a, std::size_t b) {
    const T v = table.at({a, b});
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    T raw = split_best(a, b, nullptr);
    Functional<T> w;
    if (T(theta * raw) == v) { // split preferred on ties
      split_best(a, b, &chosen);
      Json intervals = Json::array(), children = Json::array();
      for (auto [i, j] : chosen) {
        Functional<T> cw = witness(i, j);
        intervals.push_back(Json::array({pos[i], pos[j]}));
        children.push_back(cw.provenance);
        for (const auto& [idx, c] : cw.terms) w.add_term(idx, T(theta * c));
      }
      w.finalize();
      w.provenance = Json{{"kind", "split"},
                          {"theta", format_rat(n->theta)},
                          {"intervals", intervals},
                          {"children", children}};
      return w;
    }
    // coordinate branch: smallest index attaining the range peak
    for (std::size_t i = a; i <= b; ++i)
      if (scalar_traits<T>::abs(x->at(pos[i])) == v) {
        int s = sign_of(x->at(pos[i]));
        w.terms = {{pos[i], T(s)}};
        w.provenance = Json{{"kind", "coordinate"}, {"index", pos[i]}, {"sign", s}};
        return w;
      }
    throw InternalError("tsirelson witness reconstruction failed");
  }
};

template <class T>
EvalResult<T> eval_tsirelson(const NormExpr& n, const Vec<T>& x) {
  if (x.is_zero()) return zero_result<T>();
  TsirelsonEngine<T> eng{&n, &x, x.support().elements(), 0,
                         scalar_traits<T>::from_rat(n.theta), {}};
  eng.p = eng.pos.size();
  if (!n.param.is_finite() && eng.p > universe_cap())
    throw ResourceError("support size exceeds the cap for transfinite admissibility");
  eng.run();
  EvalResult<T> r;
  r.value = eng.table.at({0, eng.p - 1});
  r.witness = eng.witness(0, eng.p - 1);
  return r;
}

// ---------------------------------------------------------------------------
// weighted successive interval sums with a sign chosen per interval:
//   sup sum_i s_i alpha_i (sum_{j in I_i} x_j).
// DP over support positions; state = (intervals started, outside / inside
// with sign). Interval endpoints are support points; the weight index is the
// interval's ordinal position, so skipped weights are never reused.

template <class T>
EvalResult<T> eval_azimi(const NormExpr& n, const Vec<T>& x) {
  if (x.is_zero()) return zero_result<T>();
  const auto& es = x.entries;
  const std::size_t p = es.size();
  std::vector<T> alpha(p + 1, T(0));
  for (std::size_t c = 1; c <= p; ++c)
    alpha[c] = scalar_traits<T>::from_rat(n.alpha_rule.alpha(static_cast<std::uint32_t>(c)));

  constexpr int OUT = 0, IN_P = 1, IN_M = 2;
  // dp[i][c][s]: best total from position i onward, given c intervals already
  // started and state s
  std::vector<std::vector<std::array<T, 3>>> dp(p + 1);
  std::vector<std::vector<std::array<bool, 3>>> ok(p + 1);
  for (auto& row : dp) row.assign(p + 1, {T(0), T(0), T(0)});
  for (auto& row : ok) row.assign(p + 1, {false, false, false});

  auto coord = [&](std::size_t i) { return es[i].second; };

  for (std::size_t c = 0; c <= p; ++c)
    for (int s = 0; s < 3; ++s) ok[p][c][s] = true; // end: value 0

  for (std::size_t i = p; i-- > 0;) {
    for (std::size_t c = p + 1; c-- > 0;) {
      for (int s = 0; s < 3; ++s) {
        T best(0);
        bool have = false;
        auto consider = [&](bool cond, const T& v) {
          if (!cond) return;
          if (!have || v > best) {
            best = v;
            have = true;
          }
        };
        if (c + 1 <= p) {
          // start a new interval at position i (closing the current one if any)
          consider(ok[i + 1][c + 1][IN_P], alpha[c + 1] * coord(i) +
                                               (ok[i + 1][c + 1][IN_P] ? dp[i + 1][c + 1][IN_P] : T(0)));
          consider(ok[i + 1][c + 1][IN_M], -alpha[c + 1] * coord(i) +
                                               (ok[i + 1][c + 1][IN_M] ? dp[i + 1][c + 1][IN_M] : T(0)));
        }
        // leave position i outside every interval
        consider(ok[i + 1][c][OUT], ok[i + 1][c][OUT] ? dp[i + 1][c][OUT] : T(0));
        if (s == IN_P && c >= 1)
          consider(ok[i + 1][c][IN_P],
                   alpha[c] * coord(i) + (ok[i + 1][c][IN_P] ? dp[i + 1][c][IN_P] : T(0)));
        if (s == IN_M && c >= 1)
          consider(ok[i + 1][c][IN_M],
                   -alpha[c] * coord(i) + (ok[i + 1][c][IN_M] ? dp[i + 1][c][IN_M] : T(0)));
        dp[i][c][s] = best;
        ok[i][c][s] = have;
      }
    }
  }

  EvalResult<T> r;
  r.value = dp[0][0][OUT];

  // canonical reconstruction: start(+) > start(-) > skip > continue
  std::vector<Interval> intervals;
  std::vector<int> signs;
  std::size_t i = 0, c = 0;
  int s = OUT;
  T need = r.value;
  while (i < p) {
    bool stepped = false;
    auto val = [&](std::size_t ii, std::size_t cc, int ss) {
      return ok[ii][cc][ss] ? dp[ii][cc][ss] : T(0);
    };
    if (c + 1 <= p) {
      // continue with the stored continuation value, never need-minus-term:
      // float addition does not cancel exactly
      if (ok[i + 1][c + 1][IN_P] && alpha[c + 1] * coord(i) + val(i + 1, c + 1, IN_P) == need) {
        intervals.push_back({es[i].first, es[i].first});
        signs.push_back(1);
        need = val(i + 1, c + 1, IN_P);
        ++c;
        s = IN_P;
        ++i;
        stepped = true;
      } else if (ok[i + 1][c + 1][IN_M] &&
                 -alpha[c + 1] * coord(i) + val(i + 1, c + 1, IN_M) == need) {
        intervals.push_back({es[i].first, es[i].first});
        signs.push_back(-1);
        need = val(i + 1, c + 1, IN_M);
        ++c;
        s = IN_M;
        ++i;
        stepped = true;
      }
    }
    if (!stepped && ok[i + 1][c][OUT] && val(i + 1, c, OUT) == need) {
      s = OUT;
      ++i;
      stepped = true;
    }
    if (!stepped && s == IN_P && c >= 1 && ok[i + 1][c][IN_P] &&
        alpha[c] * coord(i) + val(i + 1, c, IN_P) == need) {
      intervals.back().hi = es[i].first;
      need = val(i + 1, c, IN_P);
      ++i;
      stepped = true;
    }
    if (!stepped && s == IN_M && c >= 1 && ok[i + 1][c][IN_M] &&
        -alpha[c] * coord(i) + val(i + 1, c, IN_M) == need) {
      intervals.back().hi = es[i].first;
      need = val(i + 1, c, IN_M);
      ++i;
      stepped = true;
    }
    if (!stepped) throw InternalError("azimi witness reconstruction failed");
  }

  Json jiv = Json::array(), jsg = Json::array();
  for (std::size_t k = 0; k < intervals.size(); ++k) {
    jiv.push_back(Json::array({intervals[k].lo, intervals[k].hi}));
    jsg.push_back(signs[k]);
    for (std::uint32_t idx = intervals[k].lo; idx <= intervals[k].hi; ++idx)
      r.witness.add_term(idx, T(T(signs[k]) * alpha[k + 1]));
  }
  r.witness.finalize();
  r.witness.provenance =
      Json{{"kind", "azimi"}, {"rule", n.alpha_rule.name}, {"intervals", jiv}, {"signs", jsg}};
  return r;
}

} // namespace normdetail

} // namespace c00

#include "c00kit/norms_mixed.hpp"

namespace c00 {
namespace normdetail {

template <class T>
EvalResult<T> eval(const NormExpr& n, const Vec<T>& x) {
  switch (n.kind) {
    case NormExpr::Kind::sup:
      return eval_sup(x);
    case NormExpr::Kind::ell1:
      return eval_ell1(x);
    case NormExpr::Kind::family:
      return eval_family(n, x);
    case NormExpr::Kind::lift:
      return eval_lift(n, x);
    case NormExpr::Kind::tsirelson:
      return eval_tsirelson(n, x);
    case NormExpr::Kind::azimi:
      return eval_azimi(n, x);
    case NormExpr::Kind::mixed_z:
      return eval_mixed(n, x);
  }
  throw InternalError("unknown norm kind");
}

} // namespace normdetail

template <class T>
EvalResult<T> eval(const NormExpr& n, const Vec<T>& x) {
  n.validate();
  if (n.float_only() && scalar_traits<T>::exact)
    throw ConfigError("norm " + n.describe() + " has no exact rational evaluation; use float mode");
  EvalResult<T> r = normdetail::eval<T>(n, x);
  if (!normdetail::close(r.witness.apply(x), r.value))
    throw InternalError("witness does not reproduce the evaluated value");
  return r;
}

template <class T>
EvalResult<T> eval(const NormExprPtr& n, const Vec<T>& x) {
  return eval<T>(*n, x);
}

} // namespace c00

#include "c00kit/norms_verify.hpp"

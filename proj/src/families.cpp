#include "c00kit/families.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>

#include "c00kit/errors.hpp"

namespace c00 {

namespace {

std::uint64_t env_cap(const char* name, std::uint64_t dflt) {
  const char* v = std::getenv(name);
  if (!v || !*v) return dflt;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v, &end, 10);
  if (!end || *end) throw ConfigError(std::string("bad value for ") + name);
  return x;
}

} // namespace

std::uint32_t universe_cap() {
  static const std::uint32_t cap =
      static_cast<std::uint32_t>(env_cap("C00KIT_UNIVERSE_CAP", 20));
  return cap;
}

std::uint64_t enumeration_cap() {
  static const std::uint64_t cap = env_cap("C00KIT_ENUM_CAP", 500000);
  return cap;
}

std::uint64_t rank_node_cap() {
  static const std::uint64_t cap = env_cap("C00KIT_RANK_NODES", 500000);
  return cap;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

struct ContainsKey {
  Ordinal xi;
  FinSet e;
  bool operator==(const ContainsKey&) const = default;
};

struct ContainsKeyHash {
  std::size_t operator()(const ContainsKey& k) const {
    return k.xi.hash() * 0x9e3779b97f4a7c15ull ^ k.e.hash();
  }
};

std::unordered_map<ContainsKey, bool, ContainsKeyHash>& contains_cache() {
  static std::unordered_map<ContainsKey, bool, ContainsKeyHash> cache;
  return cache;
}

std::mutex& contains_mutex() {
  static std::mutex m;
  return m;
}

bool contains_rec(const Ordinal& xi, const FinSet& e);

// Longest prefix of e[idx..] lying in S_mu; always at least one element, since
// singletons belong to every S_mu.
std::size_t greedy_prefix_end(const Ordinal& mu, const FinSet& e, std::size_t idx) {
  std::size_t j = idx + 1;
  while (j < e.size() && contains_rec(mu, e.slice(idx, j + 1))) ++j;
  return j;
}

bool contains_eval(const Ordinal& xi, const FinSet& e) {
  switch (xi.kind()) {
    case Ordinal::Kind::zero:
      return e.size() <= 1;
    case Ordinal::Kind::successor: {
      // Greedily stripping maximal S_mu prefixes minimizes the block count
      // (heredity lets a competing first block be shrunk to the greedy one,
      // spreading lets the rest be re-split no worse), so E is a member iff
      // the greedy decomposition uses at most min E blocks.
      const Ordinal mu = xi.predecessor();
      const std::uint64_t allowed = e.min();
      std::uint64_t blocks = 0;
      std::size_t idx = 0;
      while (idx < e.size()) {
        if (++blocks > allowed) return false;
        idx = greedy_prefix_end(mu, e, idx);
      }
      return true;
    }
    case Ordinal::Kind::limit: {
      // E is a member iff E in S_{xi[n]} for some n <= min E. The stages
      // S_{xi[n]} increase with n (S_mu is contained in S_{mu + w^j}: induct
      // on j, taking the n = 1 clause at limits and a single block at
      // successors), so the largest allowed index decides; smaller indices
      // are tried first to keep member queries shallow.
      const std::uint32_t m = e.min();
      for (std::uint64_t n = 1; n < m; n *= 2)
        if (contains_rec(xi.fundamental(n), e)) return true;
      return contains_rec(xi.fundamental(m), e);
    }
  }
  return false; // unreachable
}

bool contains_rec(const Ordinal& xi, const FinSet& e) {
  if (e.size() <= 1) return true; // empty set and singletons are in every S_xi
  if (e.min() == 1) return false; // two or more elements starting at 1 never fit
  ContainsKey key{xi, e};
  {
    std::lock_guard<std::mutex> lock(contains_mutex());
    auto it = contains_cache().find(key);
    if (it != contains_cache().end()) return it->second;
  }
  bool r = contains_eval(xi, e);
  {
    std::lock_guard<std::mutex> lock(contains_mutex());
    contains_cache().emplace(std::move(key), r);
  }
  return r;
}

} // namespace

bool schreier_contains(const Ordinal& xi, const FinSet& e) { return contains_rec(xi, e); }

bool schreier_is_maximal(const Ordinal& xi, const FinSet& e) {
  if (!schreier_contains(xi, e))
    throw ConfigError("is_maximal: " + e.str() + " is not a member of S_" + xi.str());
  const std::uint32_t next = e.empty() ? 1 : e.max() + 1;
  return !schreier_contains(xi, e.with(next));
}

// ---------------------------------------------------------------------------
// Materialized families

void MaterializedFamily::index() {
  mask_index_.clear();
  mask_index_.reserve(sets.size() * 2);
  for (const FinSet& s : sets) mask_index_.insert(s.mask());
}

bool MaterializedFamily::is_hereditary() const {
  for (const FinSet& s : sets) {
    if (s.empty()) continue;
    // dropping one element at a time reaches every subset transitively
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::vector<std::uint32_t> v;
      for (std::size_t j = 0; j < s.size(); ++j)
        if (j != i) v.push_back(s[j]);
      if (!is_member(FinSet(std::move(v)))) return false;
    }
  }
  return true;
}

bool MaterializedFamily::is_spreading_within_universe() const {
  // single +1 bumps generate all spreads that stay inside the universe
  for (const FinSet& s : sets) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::uint32_t bumped = s[i] + 1;
      if (bumped > universe) continue;
      if (i + 1 < s.size() && bumped >= s[i + 1]) continue;
      std::vector<std::uint32_t> v = s.elements();
      v[i] = bumped;
      if (!is_member(FinSet(std::move(v)))) return false;
    }
  }
  return true;
}

MaterializedFamily MaterializedFamily::from_sets(std::uint32_t universe,
                                                 std::vector<FinSet> sets, std::string label,
                                                 bool close_under_subsets) {
  if (universe > 64)
    throw ResourceError("family universe exceeds 64 (mask representation)");
  MaterializedFamily f;
  f.universe = universe;
  f.label = std::move(label);
  std::unordered_set<std::uint64_t> seen;
  std::vector<FinSet> work;
  auto push = [&](const FinSet& s) {
    if (!s.empty() && s.max() > universe)
      throw ConfigError("family set " + s.str() + " exceeds universe " +
                        std::to_string(universe));
    if (seen.insert(s.mask()).second) work.push_back(s);
  };
  push(FinSet());
  for (FinSet& s : sets) push(s);
  if (close_under_subsets) {
    for (std::size_t i = 0; i < work.size(); ++i) {
      if (work.size() > enumeration_cap())
        throw ResourceError("family closure exceeds the enumeration cap");
      FinSet s = work[i]; // copy: work may reallocate
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        std::vector<std::uint32_t> v;
        for (std::size_t j = 0; j < s.size(); ++j)
          if (j != drop) v.push_back(s[j]);
        push(FinSet(std::move(v)));
      }
    }
  }
  std::sort(work.begin(), work.end());
  f.sets = std::move(work);
  f.index();
  if (!close_under_subsets && !f.is_hereditary())
    throw ConfigError("family is not hereditary (pass closure to repair)");
  f.contains_singletons = true;
  for (std::uint32_t i = 1; i <= universe; ++i)
    if (!f.is_member(FinSet({i}))) {
      f.contains_singletons = false;
      break;
    }
  return f;
}

namespace {

// Depth-first lexicographic enumeration of all members of a hereditary family
// given by a membership predicate; prefixes of members are members, so every
// probe failure prunes a whole subtree.
template <class Member>
std::vector<FinSet> enumerate_hereditary(std::uint32_t universe, Member member) {
  std::vector<FinSet> out;
  out.push_back(FinSet());
  const std::uint64_t cap = enumeration_cap();
  auto rec = [&](auto&& self, const FinSet& e) -> void {
    for (std::uint32_t m = e.empty() ? 1 : e.max() + 1; m <= universe; ++m) {
      FinSet f = e.with(m);
      if (!member(f)) continue;
      if (out.size() >= cap) throw ResourceError("enumeration cap exceeded");
      out.push_back(f);
      self(self, f);
    }
  };
  rec(rec, FinSet());
  return out;
}

MaterializedFamily build_family(std::uint32_t universe, std::vector<FinSet> sets,
                                std::string label) {
  MaterializedFamily f;
  f.universe = universe;
  f.label = std::move(label);
  f.sets = std::move(sets); // already lexicographically sorted by construction
  f.index();
  f.contains_singletons = universe >= 1;
  return f;
}

} // namespace

MaterializedFamily materialize_schreier(const Ordinal& xi, std::uint32_t n) {
  if (n > universe_cap())
    throw ResourceError("materialize universe " + std::to_string(n) +
                        " exceeds cap " + std::to_string(universe_cap()));
  auto sets = enumerate_hereditary(n, [&](const FinSet& e) { return schreier_contains(xi, e); });
  return build_family(n, std::move(sets), "S_" + xi.str() + " on {1.." + std::to_string(n) + "}");
}

bool compose_contains(std::uint32_t m, std::uint32_t n, const FinSet& e) {
  if (e.size() <= 1) return true;
  // several elements starting at 1: either a single S_n block (min 1 rules it
  // out) or several blocks whose minima set starts at 1 (rules out S_m)
  if (e.min() == 1) return false;
  const Ordinal sm = Ordinal::finite(m);
  const Ordinal sn = Ordinal::finite(n);
  // split into greedily maximal S_n prefixes; the block minima must fit S_m
  std::vector<std::uint32_t> minima;
  std::size_t idx = 0;
  while (idx < e.size()) {
    minima.push_back(e[idx]);
    std::size_t j = idx + 1;
    while (j < e.size() && schreier_contains(sn, e.slice(idx, j + 1))) ++j;
    idx = j;
  }
  return schreier_contains(sm, FinSet(std::move(minima)));
}

MaterializedFamily compose_schreier(std::uint32_t m, std::uint32_t n, std::uint32_t universe) {
  if (universe > universe_cap())
    throw ResourceError("compose universe " + std::to_string(universe) + " exceeds cap " +
                        std::to_string(universe_cap()));
  auto sets = enumerate_hereditary(
      universe, [&](const FinSet& e) { return compose_contains(m, n, e); });
  return build_family(universe, std::move(sets),
                      "S_" + std::to_string(m) + "[S_" + std::to_string(n) + "] on {1.." +
                          std::to_string(universe) + "}");
}

bool sum_contains(const MaterializedFamily& f, std::uint32_t k, const FinSet& e) {
  if (e.empty()) return true;
  if (!e.empty() && e.max() > f.universe) return false;
  const AdmissibilityTracker root{Ordinal::finite(k)};
  // memo key: (start index, tracker state on entry)
  std::map<std::pair<std::size_t, std::string>, bool> memo;
  auto rec = [&](auto&& self, std::size_t i, const AdmissibilityTracker& t) -> bool {
    if (i == e.size()) return true;
    auto key = std::make_pair(i, t.key());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool ok = false;
    // every decomposition of the tail starts a block at e[i], so its minimum
    // e[i] must be admissible before any block shape is tried
    auto t2 = t.pushed(e[i]);
    if (t2) {
      for (std::size_t j = i; j < e.size(); ++j) {
        if (!f.is_member(e.slice(i, j + 1))) continue; // blocks from F only
        if (self(self, j + 1, *t2)) {
          ok = true;
          break;
        }
      }
    }
    memo.emplace(std::move(key), ok);
    return ok;
  };
  return rec(rec, 0, root);
}

MaterializedFamily sum_family(const MaterializedFamily& f, std::uint32_t k) {
  if (!f.contains_singletons)
    throw ConfigError("sum construction requires a family containing all singletons");
  if (!f.is_hereditary()) throw ConfigError("sum construction requires a hereditary family");
  if (f.universe > universe_cap())
    throw ResourceError("sum universe " + std::to_string(f.universe) + " exceeds cap " +
                        std::to_string(universe_cap()));
  auto sets =
      enumerate_hereditary(f.universe, [&](const FinSet& e) { return sum_contains(f, k, e); });
  return build_family(f.universe, std::move(sets),
                      f.label + " summed along S_" + std::to_string(k));
}

// ---------------------------------------------------------------------------
// Rank partition

std::unordered_map<FinSet, std::uint32_t> removal_stages(const MaterializedFamily& f) {
  std::unordered_map<std::uint64_t, const FinSet*> alive;
  for (const FinSet& s : f.sets) alive.emplace(s.mask(), &s);
  std::unordered_map<FinSet, std::uint32_t> stage;
  std::uint32_t s = 0;
  while (!alive.empty()) {
    // every stage family is hereditary (removing maximal members preserves
    // heredity), so "no alive one-element extension" detects maximality
    std::vector<std::uint64_t> remove;
    for (const auto& [mask, set] : alive) {
      bool maximal = true;
      for (std::uint32_t m = 1; m <= f.universe && maximal; ++m) {
        if (mask & (1ull << (m - 1))) continue;
        if (alive.count(mask | (1ull << (m - 1)))) maximal = false;
      }
      if (maximal) remove.push_back(mask);
    }
    if (remove.empty())
      throw InternalError("removal found no maximal member in a nonempty family");
    for (std::uint64_t mask : remove) {
      stage.emplace(*alive.at(mask), s);
      alive.erase(mask);
    }
    ++s;
  }
  return stage;
}

PartitionCheckReport partition_check(const Ordinal& xi, std::uint32_t n) {
  PartitionCheckReport rep;
  MaterializedFamily fam = materialize_schreier(xi, n);
  auto stage = removal_stages(fam);

  // (a) stages partition the family
  if (stage.size() != fam.sets.size()) {
    rep.failure = "stage assignment does not cover the family";
    return rep;
  }
  std::uint32_t stages = 0;
  for (const auto& [set, s] : stage) stages = std::max(stages, s + 1);
  rep.stage_count = stages;
  rep.stage_sizes.assign(stages, 0);
  for (const FinSet& s : fam.sets) {
    auto it = stage.find(s);
    if (it == stage.end()) {
      rep.failure = "member " + s.str() + " received no stage";
      return rep;
    }
    rep.stage_sizes[it->second]++;
  }

  // (b) stage 0 = inclusion-maximal members, via an independent pairwise
  // superset scan (the removal itself used one-element extensions)
  for (const FinSet& e : fam.sets) {
    bool maximal = true;
    for (const FinSet& g : fam.sets)
      if (e.size() < g.size() && e.subset_of(g)) {
        maximal = false;
        break;
      }
    if (maximal != (stage.at(e) == 0)) {
      rep.failure = "stage-0 mismatch at " + e.str();
      return rep;
    }
  }

  // (c) proper initial segments are removed strictly later
  for (const FinSet& e : fam.sets)
    for (const FinSet& g : fam.sets)
      if (e.proper_initial_segment_of(g) && stage.at(g) >= stage.at(e)) {
        rep.failure = "initial segment order violated: " + e.str() + " before " + g.str();
        return rep;
      }

  rep.pass = true;
  return rep;
}

// ---------------------------------------------------------------------------
// Tree rank

namespace {

struct RankEngine {
  Ordinal xi;
  std::uint32_t budget;
  std::uint64_t nodes = 0;
  std::uint64_t node_cap = rank_node_cap();
  std::map<FinSet, RankResult> memo;

  RankResult rank(const FinSet& e) {
    auto it = memo.find(e);
    if (it != memo.end()) return it->second;
    if (++nodes > node_cap) throw ResourceError("rank node budget exceeded");
    const std::uint32_t next = e.empty() ? 1 : e.max() + 1;
    RankResult res;
    if (!schreier_contains(xi, e.with(next))) {
      res = {Ordinal(), false}; // maximal: membership of E u {m} is m-invariant
    } else {
      std::vector<RankResult> window;
      window.reserve(budget);
      for (std::uint32_t j = 0; j < budget; ++j) window.push_back(rank(e.with(next + j)));
      res = fit(window);
    }
    memo.emplace(e, res);
    return res;
  }

  RankResult fit(const std::vector<RankResult>& window) const {
    bool child_extrapolated = false;
    bool all_equal = true;
    for (std::size_t i = 0; i < window.size(); ++i) {
      child_extrapolated |= window[i].extrapolated;
      if (window[i].rank != window[0].rank) all_equal = false;
      if (i + 1 < window.size() && window[i + 1].rank < window[i].rank)
        throw UndecidedError("extension ranks are not monotone across the window");
    }
    if (all_equal) return {window[0].rank.plus_term(0, 1), child_extrapolated};

    // coefficient-wise polynomial fit over the window index
    std::vector<std::uint32_t> exps;
    for (const RankResult& r : window)
      for (const auto& t : r.rank.terms())
        if (std::find(exps.begin(), exps.end(), t.exp) == exps.end()) exps.push_back(t.exp);
    std::sort(exps.begin(), exps.end(), std::greater<>());

    auto coeff_of = [](const Ordinal& o, std::uint32_t exp) -> std::int64_t {
      for (const auto& t : o.terms())
        if (t.exp == exp) return static_cast<std::int64_t>(t.coeff);
      return 0;
    };

    std::optional<std::uint32_t> grow_exp;
    for (std::uint32_t exp : exps) {
      std::vector<std::int64_t> seq;
      for (const RankResult& r : window) seq.push_back(coeff_of(r.rank, exp));
      // finite differences: degree = last level with a nonzero entry
      std::size_t degree = 0;
      std::vector<std::int64_t> level = seq;
      for (std::size_t d = 1; d < level.size(); ++d) {
        std::vector<std::int64_t> nxt;
        for (std::size_t i = 0; i + 1 < level.size(); ++i) nxt.push_back(level[i + 1] - level[i]);
        level = std::move(nxt);
        for (std::int64_t v : level)
          if (v != 0) {
            degree = d;
            break;
          }
      }
      if (degree + 2 > window.size())
        throw UndecidedError("no stable coefficient pattern within the rank budget");
      if (degree >= 1) {
        bool nondecreasing = true, grows = false;
        for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
          if (seq[i + 1] < seq[i]) nondecreasing = false;
          if (seq[i + 1] > seq[i]) grows = true;
        }
        if (!nondecreasing || !grows)
          throw UndecidedError("coefficient pattern is not monotone increasing");
        if (!grow_exp || exp > *grow_exp) grow_exp = exp;
      }
    }
    if (!grow_exp) throw UndecidedError("window entries differ but no coefficient grows");

    // sup = (terms above the growing exponent, constant across the window)
    //       + w^{grow_exp + 1}
    Ordinal head;
    for (const auto& t : window[0].rank.terms())
      if (t.exp > *grow_exp) head = head.plus_term(t.exp, t.coeff);
    return {head.plus_term(*grow_exp + 1, 1), true};
  }
};

} // namespace

RankResult schreier_rank(const Ordinal& xi, const FinSet& e, std::uint32_t budget) {
  if (budget < 2) throw ConfigError("rank budget must be at least 2");
  if (!schreier_contains(xi, e))
    throw ConfigError("rank: " + e.str() + " is not a member of S_" + xi.str());
  RankEngine eng{xi, budget, 0, rank_node_cap(), {}};
  return eng.rank(e);
}

// ---------------------------------------------------------------------------
// Admissibility tracker

AdmissibilityTracker::AdmissibilityTracker(Ordinal xi) {
  if (xi.is_finite()) {
    finite_ = true;
    std::uint64_t k = xi.finite_value();
    if (k > 4096) throw ResourceError("finite admissibility depth exceeds 4096");
    k_ = static_cast<std::uint32_t>(k);
    counters_.assign(k_, 0);
  } else {
    finite_ = false;
    xi_ = std::make_shared<Ordinal>(std::move(xi));
  }
  rebuild_key();
}

std::optional<AdmissibilityTracker> AdmissibilityTracker::pushed(std::uint32_t m) const {
  AdmissibilityTracker next = *this;
  if (finite_) {
    if (!started_) {
      next.started_ = true;
      next.counters_.assign(k_, m - 1);
    } else {
      if (k_ == 0) return std::nullopt; // S_0 holds singletons only
      std::size_t j = 0;
      while (j < k_ && counters_[j] == 0) ++j;
      if (j == k_) return std::nullopt; // no level can open another block
      next.counters_[j] -= 1;
      for (std::size_t i = 0; i < j; ++i) next.counters_[i] = m - 1;
    }
  } else {
    if (started_ && m <= prefix_.max())
      throw InternalError("tracker pushes must be strictly increasing");
    FinSet p = prefix_.with(m);
    if (!schreier_contains(*xi_, p)) return std::nullopt;
    next.prefix_ = std::move(p);
    next.started_ = true;
  }
  next.rebuild_key();
  return next;
}

void AdmissibilityTracker::rebuild_key() {
  key_.clear();
  key_.push_back(started_ ? '\1' : '\0');
  auto put32 = [this](std::uint32_t v) {
    for (int b = 0; b < 4; ++b) key_.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
  };
  if (finite_) {
    for (std::uint32_t c : counters_) put32(c);
  } else {
    for (std::uint32_t e : prefix_) put32(e);
  }
}

} // namespace c00

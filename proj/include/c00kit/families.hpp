#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "c00kit/finset.hpp"
#include "c00kit/ordinal.hpp"

namespace c00 {

// Generalized Schreier families, defined by recursion on xi < w^w:
//   S_0     = {{}} plus all singletons
//   S_{x+1} = {{}} plus all unions E_1 u ... u E_n with E_1 < ... < E_n,
//             n <= min E_1, every E_i in S_x
//   S_lam   = { E : E in S_{lam[n]} for some n <= min E }   (lam a limit)
// Every S_xi is hereditary (subsets stay in) and spreading (elementwise
// increase stays in), contains the empty set and all singletons.

// Resource caps, overridable through the environment:
//   C00KIT_UNIVERSE_CAP  max N for materialize-style enumeration   (default 20)
//   C00KIT_ENUM_CAP      max number of sets an enumeration may emit (default 500000)
//   C00KIT_RANK_NODES    max nodes a rank computation may expand    (default 500000)
std::uint32_t universe_cap();
std::uint64_t enumeration_cap();
std::uint64_t rank_node_cap();

// Membership via greedy maximal-prefix stripping at successor stages and the
// fundamental-sequence clause at limits; memoized globally. Two facts the fast
// paths rely on, both consequences of the recursion: every singleton belongs
// to every S_xi, and no set with min 1 and at least two elements belongs to
// any S_xi (at most one block is allowed and the recursion bottoms out).
bool schreier_contains(const Ordinal& xi, const FinSet& e);

// True when E has no admissible one-point extension. Membership of E u {m}
// for m > max E does not depend on m (block counts and budgets only ever
// compare against earlier minima), so testing m = max E + 1 suffices.
// pre: E in S_xi.
bool schreier_is_maximal(const Ordinal& xi, const FinSet& e);

// A finite family on {1..universe}, explicitly listed. Always holds the empty
// set; `sets` is sorted (lexicographic on increasing element lists).
struct MaterializedFamily {
  std::uint32_t universe = 0;
  std::string label;
  bool contains_singletons = false;
  std::vector<FinSet> sets;

  bool is_member(const FinSet& e) const { return mask_index_.count(e.mask()) != 0; }
  std::size_t size() const { return sets.size(); }

  // Rebuild the membership index; callers mutating `sets` must re-run this.
  void index();

  // Diagnostics used by loaders and tests.
  bool is_hereditary() const;
  bool is_spreading_within_universe() const;

  static MaterializedFamily from_sets(std::uint32_t universe, std::vector<FinSet> sets,
                                      std::string label, bool close_under_subsets);

 private:
  std::unordered_set<std::uint64_t> mask_index_;
};

// S_xi restricted to subsets of {1..n}: depth-first extension with heredity
// pruning, so only members (and their prefixes) are ever visited. Output is in
// lexicographic order.
MaterializedFamily materialize_schreier(const Ordinal& xi, std::uint32_t n);

// S_m[S_n] = unions of successive S_n-blocks whose minima form a set in S_m.
// Membership reduces to greedily splitting E into maximal S_n-prefixes and
// testing the block minima against S_m (sound because S_n is hereditary and
// S_m is hereditary and spreading).
bool compose_contains(std::uint32_t m, std::uint32_t n, const FinSet& e);
MaterializedFamily compose_schreier(std::uint32_t m, std::uint32_t n, std::uint32_t universe);

// The sum construction over an explicit base family:
//   F_k = { E_1 u ... u E_t : E_1 < ... < E_t, E_i in F \ {{}},
//           {min E_1, ..., min E_t} in S_k }  (plus the empty set).
// F need not be spreading, so membership is decided by dynamic programming
// over split points rather than greedily.
// pre: F hereditary and containing all singletons.
bool sum_contains(const MaterializedFamily& f, std::uint32_t k, const FinSet& e);
MaterializedFamily sum_family(const MaterializedFamily& f, std::uint32_t k);

// Iterated removal of inclusion-maximal members: stage(E) = the step at which
// E is removed. Within the restriction every stage is a finite number. A set
// is inclusion-maximal iff no one-element extension inside the universe is a
// member (heredity makes the two tests equivalent).
std::unordered_map<FinSet, std::uint32_t> removal_stages(const MaterializedFamily& f);

struct PartitionCheckReport {
  bool pass = false;
  std::uint32_t stage_count = 0;
  std::vector<std::size_t> stage_sizes;
  std::string failure; // empty on pass; otherwise names the first violated clause
};

// Verifies, on the materialized restriction of S_xi to {1..n}:
//   (a) the removal stages partition the family,
//   (b) stage 0 is exactly the set of inclusion-maximal members,
//   (c) E a proper initial segment of F (both members)  =>  stage(F) < stage(E).
// Clause (b) is checked by an independent route (pairwise superset scan)
// against the extension-based route used during removal.
PartitionCheckReport partition_check(const Ordinal& xi, std::uint32_t n);

struct RankResult {
  Ordinal rank;
  bool extrapolated = false; // true when a window fit (or any child) extrapolated
};

// Tree rank of E inside S_xi: 0 when maximal, else the supremum of
// rank(E u {m}) + 1 over admissible one-point extensions. Extension ranks are
// nondecreasing in m, so a window of `budget` consecutive extensions is
// inspected: a constant window yields rank + 1; otherwise the Cantor normal
// forms are fitted coefficient-wise by polynomials in the window index and the
// supremum is head + w^{e+1}, where e is the highest exponent whose
// coefficient grows. Anything else raises UndecidedError.
// pre: E in S_xi.
RankResult schreier_rank(const Ordinal& xi, const FinSet& e, std::uint32_t budget = 8);

// Streaming admissibility oracle: feed a strictly increasing sequence of
// block minima, learn after each push whether the prefix stays inside S_xi.
// For finite xi = k the state is a stack of remaining-opening counters
// (greedy absorb-innermost realizes membership); for xi >= w the pushed
// prefix is tested directly via schreier_contains. Value semantics: push
// returns the successor state and leaves *this untouched, which is what the
// interval-decomposition DP wants for memo keys.
class AdmissibilityTracker {
 public:
  explicit AdmissibilityTracker(Ordinal xi);

  std::optional<AdmissibilityTracker> pushed(std::uint32_t m) const;

  // Exact state encoding (bytes), usable as a map key alongside a position.
  const std::string& key() const { return key_; }
  bool started() const { return started_; }

 private:
  void rebuild_key();

  std::shared_ptr<const Ordinal> xi_; // shared across pushed copies
  bool finite_ = true;
  std::uint32_t k_ = 0;
  bool started_ = false;
  // finite mode: counters_[j] = remaining openings at depth j+1 (0-based),
  // counters_.size() == k_; pushing m with no absorbing level opens the
  // shallowest level with a remaining budget and resets all deeper budgets
  // to m - 1.
  std::vector<std::uint32_t> counters_;
  // general mode: minima pushed so far.
  FinSet prefix_;
  std::string key_;
};

} // namespace c00

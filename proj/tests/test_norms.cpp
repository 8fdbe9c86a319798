#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <random>
#include <vector>

#include "c00kit/json_io.hpp"
#include "c00kit/norms.hpp"

using c00::FinSet;
using c00::NormExpr;
using c00::NormExprPtr;
using c00::Ordinal;
using c00::Rat;
using c00::Vec;

namespace {

// ---------------------------------------------------------------------------
// Oracles. Direct exponential searches over the defining structures, written
// independently of the engines (which use branch-and-bound, interval DP with
// tracker states, and fixed-point tables). Fine for supports up to ~8.

Rat brute_family_norm(const std::vector<FinSet>& fam, const Vec<Rat>& x) {
  Rat best(0);
  for (const FinSet& e : fam) {
    Rat s(0);
    for (std::uint32_t i : e.elements()) s += c00::scalar_traits<Rat>::abs(x.at(i));
    best = std::max(best, s);
  }
  return best;
}

// max over successive support runs with admissible first indices of
// theta * sum of base values; zero when no run is chosen
Rat brute_lift_sum(const NormExpr& base, const Ordinal& xi, const Rat& theta, const Vec<Rat>& x) {
  const auto& es = x.entries;
  Rat best(0);
  auto rec = [&](auto&& self, std::size_t pos, std::vector<std::uint32_t> minima,
                 Rat acc) -> void {
    if (!minima.empty()) best = std::max(best, Rat(theta * acc));
    for (std::size_t i = pos; i < es.size(); ++i) {
      std::vector<std::uint32_t> next_minima = minima;
      next_minima.push_back(es[i].first);
      if (!c00::schreier_contains(xi, FinSet{std::vector<std::uint32_t>(next_minima)})) continue;
      for (std::size_t j = i; j < es.size(); ++j) {
        Vec<Rat> piece = x.restrict_to(es[i].first, es[j].first);
        self(self, j + 1, next_minima, acc + c00::eval<Rat>(base, piece).value);
      }
    }
  };
  rec(rec, 0, {}, Rat(0));
  return best;
}

// the fixed-point norm by direct recursion on support ranges
Rat brute_tsirelson(const Ordinal& xi, const Rat& theta, const Vec<Rat>& x) {
  const auto& es = x.entries;
  std::map<std::pair<std::size_t, std::size_t>, Rat> memo;
  auto rec = [&](auto&& self, std::size_t lo, std::size_t hi) -> Rat { // positions [lo, hi)
    if (lo >= hi) return Rat(0);
    auto key = std::make_pair(lo, hi);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Rat best(0);
    for (std::size_t i = lo; i < hi; ++i)
      best = std::max(best, c00::scalar_traits<Rat>::abs(es[i].second));
    // split into at least two successive runs with admissible first indices
    auto split = [&](auto&& inner, std::size_t pos, std::vector<std::uint32_t> minima,
                     Rat acc) -> void {
      if (minima.size() >= 2) best = std::max(best, Rat(theta * acc));
      for (std::size_t i = pos; i < hi; ++i) {
        std::vector<std::uint32_t> nm = minima;
        nm.push_back(es[i].first);
        if (!c00::schreier_contains(xi, FinSet{std::vector<std::uint32_t>(nm)})) continue;
        for (std::size_t j = i; j < hi; ++j) {
          if (i == lo && j + 1 == hi) continue; // a full-range block cannot join a 2+ split
          inner(inner, j + 1, nm, acc + self(self, i, j + 1));
        }
      }
    };
    split(split, lo, {}, Rat(0));
    memo[key] = best;
    return best;
  };
  return rec(rec, 0, es.size());
}

// max over successive runs of sum_c alpha_c * |run sum|, weights in run order
Rat brute_azimi(const c00::AlphaRule& rule, const Vec<Rat>& x) {
  const auto& es = x.entries;
  Rat best(0);
  auto rec = [&](auto&& self, std::size_t pos, std::uint32_t c, Rat acc) -> void {
    best = std::max(best, acc);
    for (std::size_t i = pos; i < es.size(); ++i)
      for (std::size_t j = i; j < es.size(); ++j) {
        Rat run(0);
        for (std::size_t k = i; k <= j; ++k) run += es[k].second;
        self(self, j + 1, c + 1, acc + rule.alpha(c + 1) * c00::scalar_traits<Rat>::abs(run));
      }
  };
  rec(rec, 0, 0, Rat(0));
  return best;
}

Vec<Rat> rand_vec(std::mt19937_64& rng, std::uint32_t max_idx, std::uint32_t max_support) {
  std::vector<std::pair<std::uint32_t, Rat>> es;
  std::uint32_t idx = 0;
  const std::uint32_t want = 1 + rng() % max_support;
  for (std::uint32_t k = 0; k < want; ++k) {
    idx += 1 + rng() % 3;
    if (idx > max_idx) break;
    Rat v(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 4));
    if (rng() % 2) v = -v;
    es.emplace_back(idx, v);
  }
  return Vec<Rat>::from_entries(std::move(es));
}

Vec<Rat> flip_random_signs(std::mt19937_64& rng, const Vec<Rat>& x) {
  std::vector<std::pair<std::uint32_t, Rat>> es;
  for (const auto& [i, v] : x.entries) es.emplace_back(i, rng() % 2 ? -v : v);
  return Vec<Rat>::from_entries(std::move(es));
}

} // namespace

TEST_CASE("pinned values across the engines") {
  Vec<Rat> x123 = Vec<Rat>::basis(1) + Vec<Rat>::basis(2) + Vec<Rat>::basis(3);
  auto fam1 = c00::eval<Rat>(NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1))),
                             x123);
  CHECK(fam1.value == Rat(2));
  CHECK(fam1.witness.provenance["set"] == c00::Json::array({2, 3}));

  // alternating pairs hit the full weight head: alpha_1+alpha_2+alpha_3+alpha_4
  Vec<Rat> alt = Vec<Rat>::basis(2) + Vec<Rat>::basis(1).scaled(Rat(-1)) + Vec<Rat>::basis(4) +
                 Vec<Rat>::basis(3).scaled(Rat(-1));
  CHECK(c00::eval<Rat>(NormExpr::azimi(), alt).value == Rat(1) + Rat(1, 2) + Rat(1, 3) + Rat(1, 4));

  CHECK(c00::eval<Rat>(NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)),
                       Vec<Rat>::basis(2) + Vec<Rat>::basis(3))
            .value == Rat(1));
  // {4},{5},{6} is admissible, so the weighted split wins over the sup part
  CHECK(c00::eval<Rat>(NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)),
                       Vec<Rat>::basis(4) + Vec<Rat>::basis(5) + Vec<Rat>::basis(6))
            .value == Rat(3, 2));

  // three singleton blocks would need first indices {2,3,4}, which is too long
  CHECK(c00::eval<Rat>(NormExpr::lift(NormExpr::sup(), Ordinal::finite(1)),
                       Vec<Rat>::basis(2) + Vec<Rat>::basis(3) + Vec<Rat>::basis(4))
            .value == Rat(2));

  CHECK(c00::eval<double>(NormExpr::mixed_z(Ordinal::finite(1)), Vec<double>::basis(1)).value ==
        1.0);
  // every basis vector is normalized: the stage weights square-sum below one
  CHECK(c00::eval<double>(NormExpr::mixed_z(Ordinal::finite(2)), Vec<double>::basis(7)).value ==
        1.0);
}

TEST_CASE("family norm equals the brute search, exact") {
  std::mt19937_64 rng(101);
  for (const Ordinal& xi : {Ordinal::finite(1), Ordinal::finite(2)}) {
    auto fam_sets = c00::materialize_schreier(xi, 10).sets;
    NormExprPtr n = NormExpr::family(c00::FamilyRef::schreier_family(xi));
    for (int t = 0; t < 150; ++t) {
      Vec<Rat> x = rand_vec(rng, 10, 6);
      auto ev = c00::eval<Rat>(n, x);
      CHECK(ev.value == brute_family_norm(fam_sets, x));
      CHECK(c00::verify_witness<Rat>(n, x, ev.witness, ev.value).ok);
    }
  }
}

TEST_CASE("admissible-support combinations are carried at full mass") {
  std::mt19937_64 rng(103);
  for (const Ordinal& xi : {Ordinal::finite(1), Ordinal::finite(2), Ordinal::parse("w")}) {
    NormExprPtr n = NormExpr::family(c00::FamilyRef::schreier_family(xi));
    int done = 0;
    while (done < 60) {
      Vec<Rat> x = rand_vec(rng, 12, 5);
      if (!c00::schreier_contains(xi, FinSet{x.support()})) continue;
      ++done;
      Rat mass(0);
      for (const auto& [i, v] : x.entries) mass += c00::scalar_traits<Rat>::abs(v);
      CHECK(c00::eval<Rat>(n, x).value == mass);
    }
  }
}

TEST_CASE("lifted norm equals the brute search and dominates its base") {
  std::mt19937_64 rng(107);
  std::vector<std::pair<NormExprPtr, Rat>> bases = {
      {NormExpr::sup(), Rat(1)},
      {NormExpr::sup(), Rat(1, 2)},
      {NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1))), Rat(1)}};
  for (const auto& [base, theta] : bases) {
    for (std::uint32_t k : {1u, 2u}) {
      NormExprPtr lifted = NormExpr::lift(base, Ordinal::finite(k), NormExpr::Agg::sum, theta);
      for (int t = 0; t < 60; ++t) {
        Vec<Rat> x = rand_vec(rng, 9, 5);
        auto ev = c00::eval<Rat>(lifted, x);
        CHECK(ev.value == brute_lift_sum(*base, Ordinal::finite(k), theta, x));
        CHECK(c00::verify_witness<Rat>(lifted, x, ev.witness, ev.value).ok);
        // one interval over the whole support is always admissible
        if (theta == Rat(1)) CHECK(ev.value >= c00::eval<Rat>(base, x).value);
      }
    }
  }
}

TEST_CASE("tsirelson equals the brute recursion and sits at its fixed point") {
  std::mt19937_64 rng(109);
  NormExprPtr n = NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2));
  for (int t = 0; t < 60; ++t) {
    Vec<Rat> x = rand_vec(rng, 9, 5);
    auto ev = c00::eval<Rat>(n, x);
    CHECK(ev.value == brute_tsirelson(Ordinal::finite(1), Rat(1, 2), x));
    CHECK(c00::verify_witness<Rat>(n, x, ev.witness, ev.value).ok);
  }

  // one more defining iteration using evaluated values changes nothing
  for (int t = 0; t < 20; ++t) {
    Vec<Rat> x = rand_vec(rng, 9, 5);
    if (x.is_zero()) continue;
    Rat lhs = c00::eval<Rat>(n, x).value;
    Rat best(0);
    const auto& es = x.entries;
    for (const auto& [i, v] : es) best = std::max(best, c00::scalar_traits<Rat>::abs(v));
    auto split = [&](auto&& self, std::size_t pos, std::vector<std::uint32_t> minima,
                     Rat acc) -> void {
      if (minima.size() >= 2) best = std::max(best, Rat(Rat(1, 2) * acc));
      for (std::size_t i = pos; i < es.size(); ++i) {
        std::vector<std::uint32_t> nm = minima;
        nm.push_back(es[i].first);
        if (!c00::schreier_contains(Ordinal::finite(1), FinSet{std::vector<std::uint32_t>(nm)}))
          continue;
        for (std::size_t j = i; j < es.size(); ++j) {
          Vec<Rat> piece = x.restrict_to(es[i].first, es[j].first);
          self(self, j + 1, nm, acc + c00::eval<Rat>(n, piece).value);
        }
      }
    };
    split(split, 0, {}, Rat(0));
    CHECK(lhs == best);
  }
}

TEST_CASE("azimi equals the brute search; sign flips are not neutral") {
  std::mt19937_64 rng(113);
  NormExprPtr n = NormExpr::azimi();
  for (int t = 0; t < 80; ++t) {
    Vec<Rat> x = rand_vec(rng, 9, 5);
    auto ev = c00::eval<Rat>(n, x);
    CHECK(ev.value == brute_azimi(c00::AlphaRule{}, x));
    CHECK(c00::verify_witness<Rat>(n, x, ev.witness, ev.value).ok);
  }
  // alternation strictly beats alignment: two weighted intervals against one
  Rat aligned = c00::eval<Rat>(n, Vec<Rat>::basis(1) + Vec<Rat>::basis(2)).value;
  Rat alternating =
      c00::eval<Rat>(n, Vec<Rat>::basis(2) + Vec<Rat>::basis(1).scaled(Rat(-1))).value;
  CHECK(aligned == Rat(2));           // one interval through both
  CHECK(alternating == Rat(3, 2));    // {1},{2} at weights 1, 1/2
  CHECK(aligned != alternating);
}

TEST_CASE("norm axioms hold exactly in rational mode") {
  std::mt19937_64 rng(127);
  std::vector<NormExprPtr> engines = {
      NormExpr::sup(),
      NormExpr::ell1(),
      NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1))),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(1)),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(2), NormExpr::Agg::sum, Rat(1, 2),
                     NormExpr::Outer::max_with_c0),
      NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)),
      NormExpr::azimi(),
  };
  for (const NormExprPtr& n : engines) {
    for (int t = 0; t < 40; ++t) {
      Vec<Rat> x = rand_vec(rng, 9, 4);
      Vec<Rat> y = rand_vec(rng, 9, 4);
      Rat nx = c00::eval<Rat>(n, x).value;
      Rat ny = c00::eval<Rat>(n, y).value;
      CHECK(c00::eval<Rat>(n, x + y).value <= nx + ny);
      Rat c(1 + static_cast<int>(rng() % 7), 1 + static_cast<int>(rng() % 4));
      if (rng() % 2) c = -c;
      CHECK(c00::eval<Rat>(n, x.scaled(c)).value == c00::scalar_traits<Rat>::abs(c) * nx);
      if (!x.is_zero()) CHECK(nx > Rat(0));
      if (n->unconditional()) CHECK(c00::eval<Rat>(n, flip_random_signs(rng, x)).value == nx);
    }
  }
}

TEST_CASE("float axioms for the engines without exact evaluation") {
  std::mt19937_64 rng(131);
  std::vector<NormExprPtr> engines = {
      NormExpr::mixed_z(Ordinal::finite(1)),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(1), NormExpr::Agg::euclidean, Rat(1, 2)),
  };
  for (const NormExprPtr& n : engines) {
    CHECK(n->float_only());
    CHECK_THROWS_AS(c00::eval<Rat>(n, Vec<Rat>::basis(3)), c00::ConfigError);
    for (int t = 0; t < 40; ++t) {
      Vec<Rat> xr = rand_vec(rng, 9, 4);
      Vec<Rat> yr = rand_vec(rng, 9, 4);
      // the mixed norm leaves index-1-plus-more supports undefined
      if (n->kind == NormExpr::Kind::mixed_z) {
        xr = Vec<Rat>(xr).restrict_to(2, 64);
        yr = Vec<Rat>(yr).restrict_to(2, 64);
      }
      Vec<double> x, y;
      for (const auto& [i, v] : xr.entries) x = x + Vec<double>::basis(i).scaled(c00::to_double(v));
      for (const auto& [i, v] : yr.entries) y = y + Vec<double>::basis(i).scaled(c00::to_double(v));
      double nx = c00::eval<double>(n, x).value;
      double ny = c00::eval<double>(n, y).value;
      CHECK(c00::eval<double>(n, x + y).value <= nx + ny + 1e-9);
      CHECK(c00::eval<double>(n, x.scaled(-2.0)).value == doctest::Approx(2.0 * nx).epsilon(1e-9));
      auto ev = c00::eval<double>(n, x);
      CHECK(c00::verify_witness<double>(n, x, ev.witness, ev.value).ok);
    }
  }
  CHECK_THROWS_AS(c00::eval<double>(NormExpr::mixed_z(Ordinal::finite(1)),
                                    Vec<double>::basis(1) + Vec<double>::basis(2)),
                  c00::ConfigError);
}

TEST_CASE("euclidean aggregation matches a direct search in float mode") {
  std::mt19937_64 rng(137);
  NormExprPtr n =
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(1), NormExpr::Agg::euclidean, Rat(1, 2));
  for (int t = 0; t < 40; ++t) {
    Vec<Rat> xr = rand_vec(rng, 8, 5);
    Vec<double> x;
    for (const auto& [i, v] : xr.entries) x = x + Vec<double>::basis(i).scaled(c00::to_double(v));
    if (x.is_zero()) continue;
    // same run recursion as the exact-sum oracle, aggregated in squares
    const auto& es = x.entries;
    double best = 0;
    auto rec = [&](auto&& self, std::size_t pos, std::vector<std::uint32_t> minima,
                   double acc_sq) -> void {
      if (!minima.empty()) best = std::max(best, 0.5 * std::sqrt(acc_sq));
      for (std::size_t i = pos; i < es.size(); ++i) {
        std::vector<std::uint32_t> nm = minima;
        nm.push_back(es[i].first);
        if (!c00::schreier_contains(Ordinal::finite(1), FinSet{std::vector<std::uint32_t>(nm)}))
          continue;
        for (std::size_t j = i; j < es.size(); ++j) {
          double b = c00::eval<double>(NormExpr::sup(), x.restrict_to(es[i].first, es[j].first))
                         .value;
          self(self, j + 1, nm, acc_sq + b * b);
        }
      }
    };
    rec(rec, 0, {}, 0.0);
    CHECK(c00::eval<double>(n, x).value == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("explicit finite families evaluate and witness like schreier ones") {
  std::vector<FinSet> pairs;
  for (std::uint32_t a = 1; a <= 6; ++a)
    for (std::uint32_t b = a + 1; b <= 6; ++b) pairs.push_back(FinSet({a, b}));
  c00::MaterializedFamily fam = c00::MaterializedFamily::from_sets(6, pairs, "pairs-on-6", true);
  NormExprPtr n = NormExpr::family(c00::FamilyRef::explicit_family(fam));
  CHECK(!n->spreading_monotone()); // finite universes cut spreads off

  std::mt19937_64 rng(139);
  for (int t = 0; t < 60; ++t) {
    Vec<Rat> x = rand_vec(rng, 6, 5);
    auto ev = c00::eval<Rat>(n, x);
    CHECK(ev.value == brute_family_norm(fam.sets, x));
    CHECK(c00::verify_witness<Rat>(n, x, ev.witness, ev.value).ok);
  }
}

TEST_CASE("witness verification accepts eval output and rejects tampering") {
  NormExprPtr fam1 = NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1)));
  Vec<Rat> x = Vec<Rat>::basis(1) + Vec<Rat>::basis(2) + Vec<Rat>::basis(3);
  auto ev = c00::eval<Rat>(fam1, x);
  CHECK(c00::verify_witness<Rat>(fam1, x, ev.witness, ev.value).ok);

  // forged set outside the family
  c00::Functional<Rat> fake = ev.witness;
  fake.provenance["set"] = c00::Json::array({1, 2});
  fake.terms = {{1, Rat(1)}, {2, Rat(1)}};
  auto out = c00::verify_witness<Rat>(fam1, x, fake, std::optional<Rat>(Rat(2)));
  CHECK(!out.ok);
  CHECK(out.code == "mismatch");

  // sign flipped in the stated terms only
  c00::Functional<Rat> flipped = ev.witness;
  flipped.terms[0].second = -flipped.terms[0].second;
  CHECK(c00::verify_witness<Rat>(fam1, x, flipped, ev.value).code == "mismatch");

  // wrong claimed value
  CHECK(c00::verify_witness<Rat>(fam1, x, ev.witness, std::optional<Rat>(ev.value + 1)).code ==
        "mismatch");

  // unknown provenance kind
  c00::Functional<Rat> alien = ev.witness;
  alien.provenance = c00::Json{{"kind", "imaginary"}};
  CHECK(c00::verify_witness<Rat>(fam1, x, alien, ev.value).code == "malformed");

  // provenance kind from a different engine
  c00::Functional<Rat> borrowed = ev.witness;
  borrowed.provenance = c00::Json{{"kind", "coordinate"}, {"index", 2}, {"sign", 1}};
  CHECK(c00::verify_witness<Rat>(fam1, x, borrowed, ev.value).code == "malformed");

  // the zero vector carries the zero certificate
  auto z = c00::eval<Rat>(fam1, Vec<Rat>());
  CHECK(z.value == Rat(0));
  CHECK(c00::verify_witness<Rat>(fam1, Vec<Rat>(), z.witness, z.value).ok);
}

TEST_CASE("witness verification across every engine on random vectors") {
  std::mt19937_64 rng(149);
  std::vector<NormExprPtr> engines = {
      NormExpr::sup(),
      NormExpr::ell1(),
      NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(2))),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(1)),
      NormExpr::lift(NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1))),
                     Ordinal::finite(2), NormExpr::Agg::sum, Rat(1, 2)),
      NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)),
      NormExpr::azimi(),
  };
  for (const NormExprPtr& n : engines)
    for (int t = 0; t < 30; ++t) {
      Vec<Rat> x = rand_vec(rng, 9, 5);
      auto ev = c00::eval<Rat>(n, x);
      auto got = c00::verify_witness<Rat>(n, x, ev.witness, ev.value);
      INFO(n->describe(), " on ", c00::vec_to_json(x).dump(), ": ", got.reason);
      CHECK(got.ok);
    }
}

TEST_CASE("evaluation is deterministic including the witness") {
  std::mt19937_64 rng(151);
  std::vector<NormExprPtr> engines = {
      NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::finite(1))),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(1)),
      NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)),
      NormExpr::azimi(),
  };
  for (const NormExprPtr& n : engines)
    for (int t = 0; t < 20; ++t) {
      Vec<Rat> x = rand_vec(rng, 9, 5);
      auto a = c00::eval<Rat>(n, x);
      auto b = c00::eval<Rat>(n, x);
      CHECK(c00::functional_to_json(a.witness).dump() == c00::functional_to_json(b.witness).dump());
    }
}

TEST_CASE("expression validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(c00::eval<Rat>(NormExpr::tsirelson(Ordinal::finite(1), Rat(1)),
                                 Vec<Rat>::basis(1)),
                  c00::ConfigError);
  CHECK_THROWS_AS(c00::eval<Rat>(NormExpr::tsirelson(Ordinal::finite(1), Rat(0)),
                                 Vec<Rat>::basis(1)),
                  c00::ConfigError);
  CHECK_THROWS_AS(c00::eval<Rat>(NormExpr::lift(NormExpr::sup(), Ordinal::finite(1),
                                                NormExpr::Agg::sum, Rat(2)),
                                 Vec<Rat>::basis(1)),
                  c00::ConfigError);
  c00::AlphaRule bad_rule;
  bad_rule.name = "linear";
  CHECK_THROWS_AS(c00::eval<Rat>(NormExpr::azimi(bad_rule), Vec<Rat>::basis(1)),
                  c00::ConfigError);
  c00::ThetaRule heavy;
  heavy.first = Rat(3, 4); // geometric sum reaches 3/2
  CHECK_THROWS_AS(c00::eval<double>(NormExpr::mixed_z(Ordinal::finite(1), heavy),
                                    Vec<double>::basis(2)),
                  c00::ConfigError);
}

TEST_CASE("theta rule closed forms") {
  c00::ThetaRule r;
  CHECK(r.theta(1) == Rat(1, 4));
  CHECK(r.theta(3) == Rat(1, 16));
  CHECK(r.total_sum() == Rat(1, 2));
  // tail of squares past m, checked against a long partial sum
  for (std::uint32_t m : {0u, 1u, 4u}) {
    Rat partial(0);
    for (std::uint32_t n = m + 1; n <= m + 60; ++n) partial += r.theta(n) * r.theta(n);
    Rat tail = r.tail_sq_sum(m);
    CHECK(partial < tail);
    CHECK(tail - partial < Rat(1, 1000000));
  }
}

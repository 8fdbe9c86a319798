#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "c00kit/json_io.hpp"

using c00::FinSet;
using c00::Json;
using c00::NormExpr;
using c00::Ordinal;
using c00::Rat;
using c00::Vec;

TEST_CASE("rational scalars travel as integers or p/q strings") {
  CHECK(c00::rat_from_json(Json(5)) == Rat(5));
  CHECK(c00::rat_from_json(Json(-3)) == Rat(-3));
  CHECK(c00::rat_from_json(Json("3/4")) == Rat(3, 4));
  CHECK(c00::rat_from_json(Json("-7/2")) == Rat(-7, 2));
  CHECK(c00::rat_from_json(Json("12")) == Rat(12));

  // the one rejection whose wording matters: floats silently rounding into
  // an exact pipeline would be worse than an error
  CHECK_THROWS_WITH_AS(c00::rat_from_json(Json(0.5)),
                       "non-integer numeric literals are not exact; write \"p/q\" instead",
                       c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json("3/4/5")), c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json("1.5")), c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json(" 1/2")), c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json("")), c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json("1/0")), c00::ParseError);
  CHECK_THROWS_AS(c00::rat_from_json(Json::array()), c00::ParseError);

  CHECK(c00::scalar_to_json(Rat(3, 4)) == Json("3/4"));
  CHECK(c00::scalar_to_json(Rat(-2)) == Json("-2"));
  CHECK(c00::scalar_to_json(0.25) == Json(0.25));
  // float lanes accept both spellings
  CHECK(c00::scalar_from_json<double>(Json(0.25)) == 0.25);
  CHECK(c00::scalar_from_json<double>(Json("1/4")) == 0.25);
}

TEST_CASE("vectors round-trip and reject malformed entries") {
  Vec<Rat> v = Vec<Rat>::from_entries({{2, Rat(1, 2)}, {7, Rat(-3)}});
  Json j = c00::vec_to_json(v);
  CHECK(j == Json{{"entries", Json::array({Json::array({2, "1/2"}), Json::array({7, "-3"})})}});
  CHECK(c00::vec_from_json<Rat>(j) == v);

  // entries may arrive out of order; zero values are dropped on load
  Json shuffled{{"entries", Json::array({Json::array({7, "-3"}), Json::array({2, "1/2"}),
                                         Json::array({4, "0"})})}};
  CHECK(c00::vec_from_json<Rat>(shuffled) == v);

  CHECK_THROWS_AS(c00::vec_from_json<Rat>(Json::array()), c00::ParseError);
  CHECK_THROWS_AS(c00::vec_from_json<Rat>(Json{{"entries", 3}}), c00::ParseError);
  CHECK_THROWS_AS(
      c00::vec_from_json<Rat>(Json{{"entries", Json::array({Json::array({0, "1"})})}}),
      c00::ParseError);
  CHECK_THROWS_AS(
      c00::vec_from_json<Rat>(Json{{"entries", Json::array({Json::array({-2, "1"})})}}),
      c00::ParseError);
  Json dup{{"entries", Json::array({Json::array({3, "1"}), Json::array({3, "2"})})}};
  CHECK_THROWS_AS(c00::vec_from_json<Rat>(dup), c00::ParseError);

  Vec<double> fv = c00::vec_from_json<double>(
      Json{{"entries", Json::array({Json::array({1, 0.5}), Json::array({3, "1/4"})})}});
  CHECK(fv.at(1) == 0.5);
  CHECK(fv.at(3) == 0.25);
}

TEST_CASE("sets are increasing arrays of positive integers") {
  CHECK(c00::finset_from_json(Json::array({2, 5, 9})) == FinSet::parse("2,5,9"));
  CHECK(c00::finset_from_json(Json::array()) == FinSet());
  CHECK(c00::finset_to_json(FinSet::parse("1,4")) == Json::array({1, 4}));

  CHECK_THROWS_AS(c00::finset_from_json(Json(3)), c00::ParseError);
  CHECK_THROWS_AS(c00::finset_from_json(Json::array({0, 2})), c00::ParseError);
  CHECK_THROWS_AS(c00::finset_from_json(Json::array({3, 1})), c00::ParseError);
  CHECK_THROWS_AS(c00::finset_from_json(Json::array({2, 2})), c00::ParseError);
  CHECK_THROWS_AS(c00::finset_from_json(Json::array({"2"})), c00::ParseError);
}

TEST_CASE("family files are closed hereditarily on load") {
  Json j{{"universe", 4}, {"sets", Json::array({Json::array({2, 3})})}, {"label", "pair"}};
  c00::LoadedFamily lf = c00::family_from_json(j);
  CHECK(lf.closure_added); // {2}, {3} and {} were missing on disk
  CHECK(lf.fam.universe == 4);
  CHECK(lf.fam.label == "pair");
  CHECK(lf.fam.size() == 4);
  CHECK(lf.fam.is_member(FinSet::parse("2,3")));
  CHECK(lf.fam.is_member(FinSet::parse("3")));
  CHECK(lf.fam.is_member(FinSet()));
  CHECK(!lf.fam.is_member(FinSet::parse("1")));
  CHECK(!lf.fam.contains_singletons);

  // a second trip through the wire is already closed
  c00::LoadedFamily again = c00::family_from_json(c00::family_to_json(lf.fam));
  CHECK(!again.closure_added);
  CHECK(again.fam.sets == lf.fam.sets);

  CHECK_THROWS_AS(c00::family_from_json(Json{{"sets", Json::array()}}), c00::ParseError);
  CHECK_THROWS_AS(c00::family_from_json(Json{{"universe", -1}, {"sets", Json::array()}}),
                  c00::ParseError);
  CHECK_THROWS_AS(c00::family_from_json(Json{{"universe", 4}}), c00::ParseError);
  Json oob{{"universe", 3}, {"sets", Json::array({Json::array({2, 5})})}};
  CHECK_THROWS_AS(c00::family_from_json(oob), c00::ParseError);
  Json wide{{"universe", 65}, {"sets", Json::array()}};
  CHECK_THROWS_AS(c00::family_from_json(wide), c00::ResourceError);
}

TEST_CASE("norm specs round-trip through their tagged wire form") {
  std::vector<c00::NormExprPtr> norms = {
      NormExpr::sup(),
      NormExpr::ell1(),
      NormExpr::family(c00::FamilyRef::schreier_family(Ordinal::parse("w"))),
      NormExpr::family(c00::FamilyRef::explicit_family(c00::materialize_schreier(Ordinal::finite(1), 4))),
      NormExpr::lift(NormExpr::sup(), Ordinal::finite(2)),
      NormExpr::lift(NormExpr::tsirelson(Ordinal::finite(1), Rat(1, 2)), Ordinal::finite(1),
                     NormExpr::Agg::euclidean, Rat(1, 3), NormExpr::Outer::max_with_c0),
      NormExpr::tsirelson(Ordinal::parse("w+1"), Rat(2, 3)),
      NormExpr::azimi(),
      NormExpr::mixed_z(Ordinal::finite(1)),
  };
  for (const auto& n : norms) {
    Json wire = c00::norm_to_json(*n);
    auto back = c00::norm_from_json(wire);
    CHECK(c00::norm_to_json(*back) == wire);
    CHECK(back->describe() == n->describe());
  }

  // omitted lift knobs default to sum aggregation, theta 1, plain outer
  auto lifted = c00::norm_from_json(Json{{"type", "lift"}, {"base", Json{{"type", "sup"}}}, {"k", "1"}});
  CHECK(lifted->agg == NormExpr::Agg::sum);
  CHECK(lifted->theta == Rat(1));
  CHECK(lifted->outer == NormExpr::Outer::plain);
  // mixed_z rule fields default to the geometric 1/4, 1/2 schedule
  auto mixed = c00::norm_from_json(Json{{"type", "mixed_z"}, {"xi", "1"}});
  CHECK(mixed->theta_rule.first == Rat(1, 4));
  CHECK(mixed->theta_rule.ratio == Rat(1, 2));

  CHECK_THROWS_AS(c00::norm_from_json(Json{{"type", "frobenius"}}), c00::ParseError);
  CHECK_THROWS_AS(c00::norm_from_json(Json::array()), c00::ParseError);
  CHECK_THROWS_AS(c00::norm_from_json(Json{{"type", "family"}}), c00::ParseError);
  CHECK_THROWS_AS(c00::norm_from_json(Json{{"type", "lift"}, {"k", "1"}}), c00::ParseError);
  CHECK_THROWS_AS(c00::norm_from_json(Json{{"type", "tsirelson"}, {"xi", "1"}}), c00::ParseError);
  CHECK_THROWS_AS(c00::norm_from_json(Json{{"type", "tsirelson"}, {"xi", 1}, {"theta", "1/2"}}),
                  c00::ParseError);
  Json bad_agg{{"type", "lift"}, {"base", Json{{"type", "sup"}}}, {"k", "1"}, {"agg", "median"}};
  CHECK_THROWS_AS(c00::norm_from_json(bad_agg), c00::ParseError);
  Json bad_outer{{"type", "lift"}, {"base", Json{{"type", "sup"}}}, {"k", "1"}, {"outer", "min"}};
  CHECK_THROWS_AS(c00::norm_from_json(bad_outer), c00::ParseError);
}

TEST_CASE("functionals carry terms and provenance through the wire") {
  c00::Functional<Rat> f;
  f.add_term(2, Rat(1, 2));
  f.add_term(5, Rat(-1, 2));
  f.finalize();
  f.provenance = Json{{"kind", "coordinate"}, {"index", 2}};

  Json wire = c00::functional_to_json(f);
  auto back = c00::functional_from_json<Rat>(wire);
  CHECK(back.terms == f.terms);
  CHECK(back.provenance == f.provenance);
  CHECK(c00::functional_to_json(back) == wire);

  // merged and zero terms collapse on load
  Json merged{{"terms", Json::array({Json::array({3, "1/2"}), Json::array({3, "-1/2"}),
                                     Json::array({1, "2"})})}};
  auto g = c00::functional_from_json<Rat>(merged);
  CHECK(g.terms == std::vector<std::pair<std::uint32_t, Rat>>{{1, Rat(2)}});
  CHECK(g.provenance.is_null());

  CHECK_THROWS_AS(c00::functional_from_json<Rat>(Json{{"terms", 1}}), c00::ParseError);
  Json bad{{"terms", Json::array({Json::array({0, "1"})})}};
  CHECK_THROWS_AS(c00::functional_from_json<Rat>(bad), c00::ParseError);
}

TEST_CASE("certificates serialize with exact scalars") {
  c00::SpreadingQuery<Rat> q;
  for (std::uint32_t i = 1; i <= 6; ++i) q.vectors.push_back(Vec<Rat>::basis(i));
  q.norm = NormExpr::sup();
  q.xi = Ordinal::finite(1);
  Json j = c00::certificate_to_json(c00::spreading_constant(q));
  CHECK(j["delta"] == Json("1/3"));
  CHECK(j["witness_E"] == Json::array({3, 4, 5}));
  CHECK(j["witness_coeffs"] == Json::array({"1/3", "1/3", "1/3"}));
  CHECK(j["gap"] == Json(0.0));
  CHECK(j["witness_functional"].contains("terms"));
}

TEST_CASE("json files write with a trailing newline and load back verbatim") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "c00kit_io_test";
  fs::create_directories(dir);
  const auto path = (dir / "roundtrip.json").string();

  Json j{{"b", 1}, {"a", Json::array({"1/2", 3})}};
  c00::write_json_file(path, j);
  CHECK(c00::load_json_file(path) == j);

  std::ifstream in(path, std::ios::binary);
  std::string raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(!raw.empty());
  CHECK(raw.back() == '\n');
  // insertion order is preserved, not alphabetized: byte-stable reruns need that
  CHECK(raw.find("\"b\"") < raw.find("\"a\""));

  CHECK_THROWS_AS(c00::load_json_file((dir / "absent.json").string()), c00::ParseError);
  const auto mangled = (dir / "mangled.json").string();
  std::ofstream(mangled) << "{\"a\": ";
  CHECK_THROWS_AS(c00::load_json_file(mangled), c00::ParseError);
  fs::remove_all(dir);
}

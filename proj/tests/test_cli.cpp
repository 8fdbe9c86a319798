#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "c00kit/json_io.hpp"

// C00KIT_CLI_PATH points at the built binary; every case here goes through a
// real child process so exit codes and stream separation are the ones users see.

namespace {

namespace fs = std::filesystem;
using c00::Json;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const fs::path& work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "c00kit_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  static int seq = 0;
  fs::path op = work_dir() / ("out" + std::to_string(seq));
  fs::path ep = work_dir() / ("err" + std::to_string(seq));
  ++seq;
  std::string cmd = env_prefix + (env_prefix.empty() ? "" : " ") + C00KIT_CLI_PATH + " " + args +
                    " >" + op.string() + " 2>" + ep.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.out = slurp(op);
  r.err = slurp(ep);
  return r;
}

std::string write_fixture(const std::string& name, const Json& j) {
  fs::path p = work_dir() / name;
  c00::write_json_file(p.string(), j);
  return p.string();
}

Json parse_envelope(const RunResult& r) {
  REQUIRE(r.exit_code == 0);
  Json j = Json::parse(r.out);
  REQUIRE(j.contains("version"));
  REQUIRE(j.contains("seed"));
  REQUIRE(j.contains("config"));
  REQUIRE(j.contains("result"));
  return j;
}

} // namespace

TEST_CASE("norm eval reports value and witness in both scalar lanes") {
  auto spec = write_fixture("sup.json", Json{{"type", "sup"}});
  auto vec = write_fixture("x.json",
                           Json{{"entries", Json::array({Json::array({2, "1"}),
                                                         Json::array({3, "1/2"})})}});
  Json j = parse_envelope(run("norm eval --spec " + spec + " --vec " + vec));
  CHECK(j["result"]["value"] == Json("1"));
  CHECK(j["result"]["witness"]["terms"].is_array());

  Json f = parse_envelope(
      run("norm eval --spec " + spec + " --vec " + vec + " --scalars float"));
  CHECK(f["result"]["value"].is_number());
  CHECK(f["result"]["value"].get<double>() == doctest::Approx(1.0));

  RunResult bad = run("norm eval --spec " + spec + " --vec " + vec + " --scalars decimal");
  CHECK(bad.exit_code == 2);
  CHECK(bad.out.empty());
  CHECK(!bad.err.empty());
}

TEST_CASE("float-only norms refuse the exact lane through the cli too") {
  auto spec = write_fixture("mixed.json", Json{{"type", "mixed_z"}, {"xi", "1"}});
  auto vec = write_fixture("x2.json",
                           Json{{"entries", Json::array({Json::array({2, "1"})})}});
  RunResult r = run("norm eval --spec " + spec + " --vec " + vec);
  CHECK(r.exit_code == 2);
  CHECK(r.out.empty());
  CHECK(r.err.find("error:") == 0);

  RunResult f = run("norm eval --spec " + spec + " --vec " + vec + " --scalars float");
  CHECK(f.exit_code == 0);
}

TEST_CASE("family membership and maximality queries") {
  Json yes = parse_envelope(run("family contains --xi 1 --set 2,3"));
  CHECK(yes["result"]["contains"] == Json(true));
  Json no = parse_envelope(run("family contains --xi 1 --set 1,2"));
  CHECK(no["result"]["contains"] == Json(false)); // a false answer is still exit 0
  Json deep = parse_envelope(run("family contains --xi w --set 3,5,6"));
  CHECK(deep["result"]["contains"] == Json(true));

  Json mx = parse_envelope(run("family maximal --xi 1 --set 2,3"));
  CHECK(mx["result"]["maximal"] == Json(true));
  Json nmx = parse_envelope(run("family maximal --xi 1 --set 3,4"));
  CHECK(nmx["result"]["maximal"] == Json(false));

  RunResult tb = run("family contains --xi 1 --set 2,3 --format table");
  CHECK(tb.exit_code == 0);
  CHECK(tb.out.find("result.contains") != std::string::npos);
  CHECK(tb.out.find("true") != std::string::npos);
}

TEST_CASE("rank distinguishes settled, extrapolated, and refused answers") {
  Json r3 = parse_envelope(run("family rank --xi 1 --set 4 --budget 3"));
  CHECK(r3["result"]["rank"] == Json("3"));
  CHECK(r3["result"]["extrapolated"] == Json(false));

  Json rw = parse_envelope(run("family rank --xi 1 --set \"\" --budget 3"));
  CHECK(rw["result"]["rank"] == Json("w"));
  CHECK(rw["result"]["extrapolated"] == Json(true));

  // a window too small to expose the pattern is an explicit refusal, not a guess
  RunResult undecided = run("family rank --xi 2 --set \"\" --budget 2");
  CHECK(undecided.exit_code == 4);
  CHECK(undecided.out.empty());
  CHECK(undecided.err.find("undecided:") == 0);

  // and a node budget that runs out is a resource report, not a wrong rank
  RunResult capped = run("family rank --xi 2 --set 4 --budget 8", "C00KIT_RANK_NODES=50000");
  CHECK(capped.exit_code == 3);
  CHECK(capped.out.empty());
  CHECK(capped.err.find("resource cap:") == 0);
}

TEST_CASE("materialize, compose, and sum agree with each other") {
  auto outp = (work_dir() / "s1on4.json").string();
  Json m = parse_envelope(run("family materialize --xi 1 --N 4 --out " + outp));
  CHECK(m["result"]["size"] == Json(8));
  Json on_disk = c00::load_json_file(outp);
  CHECK(on_disk["universe"] == Json(4));
  CHECK(on_disk["sets"].size() == 8);

  RunResult eq = run("family compose --m 1 --n 1 --N 6 --check-against 2");
  CHECK(eq.exit_code == 0);
  CHECK(Json::parse(eq.out)["result"]["equal"] == Json(true));
  // N=6 saturates: every subset of {2..6} is already in S_2, so S_3 adds
  // nothing and the honest answer to --check-against 3 is "equal"
  RunResult sat = run("family compose --m 1 --n 1 --N 6 --check-against 3");
  CHECK(sat.exit_code == 0);
  CHECK(Json::parse(sat.out)["result"]["equal"] == Json(true));
  RunResult ne = run("family compose --m 1 --n 1 --N 6 --check-against 0");
  CHECK(ne.exit_code == 1); // mismatch is a failed check, with the report printed
  CHECK(Json::parse(ne.out)["result"]["equal"] == Json(false));

  Json sing = Json::array();
  for (int i = 1; i <= 6; ++i) sing.push_back(Json::array({i}));
  auto singp = write_fixture("singletons6.json", Json{{"universe", 6}, {"sets", sing}});
  Json summed = parse_envelope(run("family sum --family " + singp + " --k 2"));
  CHECK(summed["result"]["closure_added"] == Json(false));
  Json direct = parse_envelope(run("family materialize --xi 2 --N 6"));
  CHECK(summed["result"]["size"] == direct["result"]["size"]);
  CHECK(summed["result"]["family"]["sets"] == direct["result"]["family"]["sets"]);
}

TEST_CASE("partition check reports stage sizes") {
  Json j = parse_envelope(run("family partition --xi 1 --N 5"));
  CHECK(j["result"]["pass"] == Json(true));
  CHECK(j["result"]["stages"] == Json(4));
  CHECK(j["result"]["stage_sizes"] == Json::array({5, 4, 3, 1}));
}

TEST_CASE("spread constant: single certificates, sweeps, and csv") {
  auto spec = write_fixture("sup2.json", Json{{"type", "sup"}});
  Json one = parse_envelope(run("spread constant --xi 1 --basis 8 --norm " + spec));
  const Json& cert = one["result"]["certificate"];
  CHECK(cert["delta"] == Json("1/4"));
  CHECK(cert["witness_E"] == Json::array({4, 5, 6, 7}));
  CHECK(cert["witness_coeffs"] == Json::array({"1/4", "1/4", "1/4", "1/4"}));
  CHECK(cert["gap"] == Json(0.0));

  Json sweep = parse_envelope(run("spread constant --xi 1,2 --basis 5,6 --norm " + spec));
  REQUIRE(sweep["result"]["sweep"].size() == 4);
  CHECK(sweep["result"]["sweep"][0]["xi"] == Json("1"));
  CHECK(sweep["result"]["sweep"][3]["certificate"]["delta"] == Json("1/5"));

  RunResult csv = run("spread constant --xi 1,2 --basis 6 --norm " + spec + " --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.find("# c00kit ") == 0);
  CHECK(csv.out.find("xi,N,delta,gap\n") != std::string::npos);
  CHECK(csv.out.find("1,6,1/3,0.0\n") != std::string::npos);
  CHECK(csv.out.find("2,6,1/5,0.0\n") != std::string::npos);

  Json fl = parse_envelope(
      run("spread constant --xi 1 --basis 6 --norm " + spec + " --scalars float"));
  CHECK(fl["result"]["certificate"]["delta"].get<double>() == doctest::Approx(1.0 / 3).epsilon(1e-7));
  CHECK(fl["result"]["certificate"]["gap"].get<double>() <= 1e-9);

  RunResult wide = run("spread constant --xi 1 --basis 21 --norm " + spec);
  CHECK(wide.exit_code == 3);
  CHECK(wide.out.empty());
}

TEST_CASE("flatten answers found only strictly below eps") {
  auto spec = write_fixture("sup3.json", Json{{"type", "sup"}});
  Json miss = parse_envelope(run("spread flatten --xi 1 --eps 1/5 --norm " + spec));
  CHECK(miss["result"]["found"] == Json(false));
  CHECK(miss["result"]["delta"] == Json("1/5"));
  CHECK(!miss["result"].contains("E"));

  Json hit = parse_envelope(run("spread flatten --xi 1 --eps 21/100 --norm " + spec));
  CHECK(hit["result"]["found"] == Json(true));
  CHECK(hit["result"]["E"] == Json::array({5, 6, 7, 8, 9}));
  CHECK(hit["result"]["coeffs"].size() == 5);
}

TEST_CASE("average folds staged witnesses into one vector") {
  Json stages{{"stages", Json::array({Json{{"E", Json::array({1})}, {"coeffs", Json::array({"1"})}},
                                      Json{{"E", Json::array({2})}, {"coeffs", Json::array({"1"})}},
                                      Json{{"E", Json::array({3, 4})},
                                           {"coeffs", Json::array({"1/2", "1/2"})}},
                                      Json{{"E", Json::array({5})}, {"coeffs", Json::array({"-1"})}}})}};
  auto p = write_fixture("stages.json", stages);
  Json j = parse_envelope(run("spread average --witnesses " + p + " --m 2"));
  CHECK(j["result"]["vector"]["entries"] ==
        Json::array({Json::array({3, "1/4"}), Json::array({4, "1/4"}), Json::array({5, "-1/2"})}));

  RunResult few = run("spread average --witnesses " + p + " --m 3");
  CHECK(few.exit_code == 2);
  CHECK(few.out.empty());
}

TEST_CASE("verify runs suites and reruns are byte-identical") {
  RunResult a = run("verify azimi-identity --max-E 4 --samples 50");
  CHECK(a.exit_code == 0);
  Json ja = Json::parse(a.out);
  CHECK(ja["result"]["failures"] == Json::array());
  CHECK(ja["result"]["checked"].get<int>() > 0);

  RunResult b = run("verify azimi-identity --max-E 4 --samples 50");
  CHECK(b.out == a.out);

  RunResult seeded = run("verify azimi-identity --max-E 4 --samples 50 --seed 7");
  CHECK(seeded.exit_code == 0);
  CHECK(Json::parse(seeded.out)["seed"] == Json(7));

  RunResult part = run("verify partition --xi 1 --N 6");
  CHECK(part.exit_code == 0);

  RunResult unknown = run("verify frobnicate");
  CHECK(unknown.exit_code == 2);
  CHECK(unknown.out.empty());
  CHECK(unknown.err.find("error:") == 0);
}

TEST_CASE("argument errors exit 2 and help exits 0") {
  RunResult missing = run("norm eval --vec nowhere.json");
  CHECK(missing.exit_code == 2);
  CHECK(missing.out.empty());

  RunResult unknown = run("family frobnicate");
  CHECK(unknown.exit_code == 2);

  RunResult bare = run("");
  CHECK(bare.exit_code == 2);

  RunResult help = run("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("Usage") != std::string::npos);

  RunResult absent = run("norm eval --spec /nonexistent.json --vec /nonexistent.json");
  CHECK(absent.exit_code == 2);
  CHECK(absent.err.find("cannot open") != std::string::npos);
}

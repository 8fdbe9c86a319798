#include <array>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "c00kit/json_io.hpp"
#include "c00kit/verify_suites.hpp"
#include "c00kit/version.hpp"

using namespace c00;

namespace {

// every report embeds the artifact version, the seed, and a config echo;
// rational-mode outputs are byte-stable run to run
Json envelope(std::uint64_t seed, Json config, Json result) {
  return Json{{"version", kVersion},
              {"seed", seed},
              {"config", std::move(config)},
              {"result", std::move(result)}};
}

void table_lines(const std::string& prefix, const Json& j,
                 std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) table_lines(prefix.empty() ? k : prefix + "." + k, v, out);
    return;
  }
  out.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
}

void print_envelope(const std::string& format, const Json& env) {
  if (format == "table") {
    std::vector<std::pair<std::string, std::string>> lines;
    table_lines("", env, lines);
    std::size_t w = 0;
    for (const auto& [k, v] : lines) w = std::max(w, k.size());
    for (const auto& [k, v] : lines)
      std::cout << k << std::string(w - k.size() + 2, ' ') << v << "\n";
    return;
  }
  std::cout << env.dump(2) << "\n";
}

// CLI scalars: "p/q", integers, and decimal literals like 0.3
Rat parse_cli_rat(const std::string& s) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) return rat_from_json(Json(s));
  bool neg = !s.empty() && s[0] == '-';
  const std::string ip = s.substr(neg ? 1 : 0, dot - (neg ? 1 : 0));
  const std::string fp = s.substr(dot + 1);
  if (fp.empty() || fp.find_first_not_of("0123456789") != std::string::npos ||
      (!ip.empty() && ip.find_first_not_of("0123456789") != std::string::npos))
    throw ParseError("bad numeric literal '" + s + "'");
  Rat den(1);
  for (std::size_t i = 0; i < fp.size(); ++i) den *= 10;
  Rat v = (ip.empty() ? Rat(0) : Rat(ip)) + Rat(fp) / den;
  return neg ? Rat(-v) : v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto comma = s.find(',', start);
    if (comma == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

bool want_rational(const std::string& scalars) {
  if (scalars == "rational") return true;
  if (scalars == "float") return false;
  throw ConfigError("scalars must be 'rational' or 'float'");
}

template <class T>
std::vector<Vec<T>> spread_vectors(std::uint32_t basis, const std::string& vectors_path) {
  std::vector<Vec<T>> vs;
  if (!vectors_path.empty()) {
    Json j = load_json_file(vectors_path);
    if (!j.is_object() || !j.contains("vectors") || !j["vectors"].is_array())
      throw ParseError("vector-list JSON needs a \"vectors\" array");
    for (const auto& vj : j["vectors"]) vs.push_back(vec_from_json<T>(vj));
    return vs;
  }
  for (std::uint32_t i = 1; i <= basis; ++i) vs.push_back(Vec<T>::basis(i));
  return vs;
}

struct SpreadArgs {
  std::string xi = "1";
  std::string norm_path;
  std::string vectors_path;
  std::string basis = "10";
  std::string mode = "convex";
  std::string scalars = "rational";
  std::string format = "json";
  std::string eps;
  std::uint32_t floor = 0;
  std::uint32_t set_cap = 0;
  double tolerance = 1e-9;
};

template <class T>
Json spread_certificate_row(const SpreadArgs& a, const Ordinal& xi, std::uint32_t basis) {
  SpreadingQuery<T> q;
  q.vectors = spread_vectors<T>(basis, a.vectors_path);
  q.norm = norm_from_json(load_json_file(a.norm_path));
  q.xi = xi;
  q.mode = a.mode == "sphere" ? SpreadingQuery<T>::Mode::ell1_sphere
                              : SpreadingQuery<T>::Mode::convex;
  q.tolerance = a.tolerance;
  q.set_size_cap = a.set_cap;
  return certificate_to_json(spreading_constant(q, a.floor));
}

int cmd_spread_constant(const SpreadArgs& a) {
  if (a.mode != "convex" && a.mode != "sphere")
    throw ConfigError("mode must be 'convex' or 'sphere'");
  const bool rational = want_rational(a.scalars);
  Json config{{"xi", a.xi},     {"norm", a.norm_path},   {"basis", a.basis},
              {"mode", a.mode}, {"scalars", a.scalars},  {"floor", a.floor},
              {"set_cap", a.set_cap}, {"tolerance", a.tolerance}};
  if (!a.vectors_path.empty()) config["vectors"] = a.vectors_path;

  std::vector<std::pair<Ordinal, std::uint32_t>> grid;
  for (const auto& xs : split_list(a.xi))
    for (const auto& ns : split_list(a.basis))
      grid.emplace_back(Ordinal::parse(xs), static_cast<std::uint32_t>(std::stoul(ns)));

  std::vector<Json> rows;
  for (const auto& [xi, n] : grid)
    rows.push_back(rational ? spread_certificate_row<Rat>(a, xi, n)
                            : spread_certificate_row<double>(a, xi, n));

  if (a.format == "csv") {
    std::cout << "# c00kit " << kVersion << "\n";
    std::cout << "xi,N,delta,gap\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& [xi, n] = grid[i];
      const Json& d = rows[i]["delta"];
      std::cout << xi.str() << "," << n << ","
                << (d.is_string() ? d.get<std::string>() : d.dump()) << ","
                << rows[i]["gap"].dump() << "\n";
    }
    return 0;
  }
  Json result;
  if (rows.size() == 1) {
    result = Json{{"certificate", rows[0]}};
  } else {
    Json sweep = Json::array();
    for (std::size_t i = 0; i < rows.size(); ++i)
      sweep.push_back(Json{{"xi", grid[i].first.str()},
                           {"N", grid[i].second},
                           {"certificate", rows[i]}});
    result = Json{{"sweep", sweep}};
  }
  print_envelope(a.format, envelope(0, config, result));
  return 0;
}

template <class T>
Json flatten_result(const SpreadArgs& a) {
  const Ordinal xi = Ordinal::parse(a.xi);
  std::vector<Vec<T>> vs =
      spread_vectors<T>(static_cast<std::uint32_t>(std::stoul(a.basis)), a.vectors_path);
  const T eps = scalar_traits<T>::from_rat(parse_cli_rat(a.eps));
  FlatteningResult<T> fr =
      flattening_search<T>(vs, norm_from_json(load_json_file(a.norm_path)), xi, eps, a.floor,
                           a.tolerance, a.set_cap);
  Json coeffs = Json::array();
  for (const auto& c : fr.coeffs) coeffs.push_back(scalar_to_json(c));
  Json result{{"found", fr.found}, {"delta", scalar_to_json(fr.value)}};
  if (fr.found) {
    result["E"] = finset_to_json(fr.e);
    result["coeffs"] = coeffs;
  }
  return result;
}

int cmd_spread_flatten(const SpreadArgs& a) {
  if (a.eps.empty()) throw ConfigError("flatten needs --eps");
  const bool rational = want_rational(a.scalars);
  Json config{{"xi", a.xi},        {"eps", a.eps},         {"floor", a.floor},
              {"norm", a.norm_path}, {"basis", a.basis},   {"scalars", a.scalars},
              {"set_cap", a.set_cap}, {"tolerance", a.tolerance}};
  Json result = rational ? flatten_result<Rat>(a) : flatten_result<double>(a);
  print_envelope(a.format, envelope(0, config, result));
  return 0;
}

int cmd_spread_average(const std::string& witnesses_path, std::uint32_t m,
                       const std::string& format) {
  Json j = load_json_file(witnesses_path);
  if (!j.is_object() || !j.contains("stages") || !j["stages"].is_array())
    throw ParseError("witness-stage JSON needs a \"stages\" array");
  std::vector<std::pair<FinSet, std::vector<Rat>>> stages;
  for (const auto& st : j["stages"]) {
    if (!st.is_object() || !st.contains("E") || !st.contains("coeffs"))
      throw ParseError("each stage needs \"E\" and \"coeffs\"");
    std::vector<Rat> coeffs;
    for (const auto& c : st["coeffs"]) coeffs.push_back(rat_from_json(c));
    stages.emplace_back(finset_from_json(st["E"]), std::move(coeffs));
  }
  Vec<Rat> avg = build_average<Rat>(stages, m, [](std::uint32_t i) { return Vec<Rat>::basis(i); });
  Json config{{"witnesses", witnesses_path}, {"m", m}};
  print_envelope(format, envelope(0, config, Json{{"vector", vec_to_json(avg)}}));
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Schreier-family combinatorics, exact norm evaluation, and spreading-constant "
               "certification"};
  app.require_subcommand(1);
  std::function<int()> action;

  // ---- norm ----
  auto* norm_cmd = app.add_subcommand("norm", "evaluate norms on vectors");
  norm_cmd->require_subcommand(1);
  {
    auto* eval_cmd = norm_cmd->add_subcommand("eval", "evaluate a norm with witness");
    auto spec = std::make_shared<std::string>();
    auto vecp = std::make_shared<std::string>();
    auto scalars = std::make_shared<std::string>("rational");
    auto format = std::make_shared<std::string>("json");
    eval_cmd->add_option("--spec", *spec, "norm spec JSON file")->required();
    eval_cmd->add_option("--vec", *vecp, "vector JSON file")->required();
    eval_cmd->add_option("--scalars", *scalars, "rational | float");
    eval_cmd->add_option("--format", *format, "json | table");
    eval_cmd->callback([=, &action] {
      action = [=]() -> int {
        const bool rational = want_rational(*scalars);
        NormExprPtr n = norm_from_json(load_json_file(*spec));
        Json config{{"spec", *spec}, {"vec", *vecp}, {"scalars", *scalars}};
        Json result;
        if (rational) {
          auto ev = eval<Rat>(n, vec_from_json<Rat>(load_json_file(*vecp)));
          result = Json{{"value", scalar_to_json(ev.value)},
                        {"witness", functional_to_json(ev.witness)}};
        } else {
          auto ev = eval<double>(n, vec_from_json<double>(load_json_file(*vecp)));
          result = Json{{"value", scalar_to_json(ev.value)},
                        {"witness", functional_to_json(ev.witness)}};
        }
        print_envelope(*format, envelope(0, config, result));
        return 0;
      };
    });
  }

  // ---- family ----
  auto* family_cmd = app.add_subcommand("family", "query and materialize set families");
  family_cmd->require_subcommand(1);
  auto add_family_query = [&](const char* name, const char* help,
                              std::function<Json(const Ordinal&, const FinSet&)> run) {
    auto* c = family_cmd->add_subcommand(name, help);
    auto xi = std::make_shared<std::string>("1");
    auto set = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    c->add_option("--xi", *xi, "family index (ordinal below w^w)")->required();
    c->add_option("--set", *set, "comma list, e.g. 2,3");
    c->add_option("--format", *format, "json | table");
    c->callback([=, &action] {
      action = [=]() -> int {
        Json config{{"xi", *xi}, {"set", *set}};
        Json result = run(Ordinal::parse(*xi), FinSet::parse(*set));
        print_envelope(*format, envelope(0, config, result));
        return 0;
      };
    });
  };
  add_family_query("contains", "membership in a Schreier family",
                   [](const Ordinal& xi, const FinSet& e) {
                     return Json{{"contains", schreier_contains(xi, e)}};
                   });
  add_family_query("maximal", "inclusion-maximality in a Schreier family",
                   [](const Ordinal& xi, const FinSet& e) {
                     return Json{{"maximal", schreier_is_maximal(xi, e)}};
                   });
  {
    auto* c = family_cmd->add_subcommand("rank", "removal rank of a member set");
    auto xi = std::make_shared<std::string>("1");
    auto set = std::make_shared<std::string>();
    auto budget = std::make_shared<std::uint32_t>(8);
    auto format = std::make_shared<std::string>("json");
    c->add_option("--xi", *xi)->required();
    c->add_option("--set", *set);
    c->add_option("--budget", *budget, "extension window inspected per step");
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        RankResult rr = schreier_rank(Ordinal::parse(*xi), FinSet::parse(*set), *budget);
        Json config{{"xi", *xi}, {"set", *set}, {"budget", *budget}};
        Json result{{"rank", rr.rank.str()}, {"extrapolated", rr.extrapolated}};
        print_envelope(*format, envelope(0, config, result));
        return 0;
      };
    });
  }
  {
    auto* c = family_cmd->add_subcommand("materialize", "list a Schreier family on {1..N}");
    auto xi = std::make_shared<std::string>("1");
    auto n = std::make_shared<std::uint32_t>(8);
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    c->add_option("--xi", *xi)->required();
    c->add_option("--N", *n)->required();
    c->add_option("--out", *out, "also write the family JSON to this file");
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        MaterializedFamily f = materialize_schreier(Ordinal::parse(*xi), *n);
        Json fj = family_to_json(f);
        if (!out->empty()) write_json_file(*out, fj);
        Json config{{"xi", *xi}, {"N", *n}};
        print_envelope(*format,
                       envelope(0, config, Json{{"size", f.size()}, {"family", fj}}));
        return 0;
      };
    });
  }
  {
    auto* c = family_cmd->add_subcommand("compose", "compose two Schreier families");
    auto m = std::make_shared<std::uint32_t>(1);
    auto n = std::make_shared<std::uint32_t>(1);
    auto uni = std::make_shared<std::uint32_t>(10);
    auto check = std::make_shared<std::int64_t>(-1);
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    c->add_option("--m", *m)->required();
    c->add_option("--n", *n)->required();
    c->add_option("--N", *uni, "universe for the materialization")->required();
    c->add_option("--check-against", *check, "compare against S_k on the same universe");
    c->add_option("--out", *out);
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        MaterializedFamily composed = compose_schreier(*m, *n, *uni);
        Json config{{"m", *m}, {"n", *n}, {"N", *uni}};
        Json result{{"size", composed.size()}};
        bool pass = true;
        if (*check >= 0) {
          config["check_against"] = *check;
          MaterializedFamily direct =
              materialize_schreier(Ordinal::finite(static_cast<std::uint64_t>(*check)), *uni);
          pass = composed.sets == direct.sets;
          result["equal"] = pass;
        } else {
          result["family"] = family_to_json(composed);
        }
        if (!out->empty()) write_json_file(*out, family_to_json(composed));
        print_envelope(*format, envelope(0, config, result));
        return pass ? 0 : 1;
      };
    });
  }
  {
    auto* c = family_cmd->add_subcommand("sum", "k-fold union closure of an explicit family");
    auto fam_path = std::make_shared<std::string>();
    auto k = std::make_shared<std::uint32_t>(1);
    auto out = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    c->add_option("--family", *fam_path, "explicit family JSON file")->required();
    c->add_option("--k", *k, "number of successive members united")->required();
    c->add_option("--out", *out);
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        LoadedFamily lf = family_from_json(load_json_file(*fam_path));
        MaterializedFamily s = sum_family(lf.fam, *k);
        if (!out->empty()) write_json_file(*out, family_to_json(s));
        Json config{{"family", *fam_path}, {"k", *k}};
        print_envelope(*format, envelope(0, config,
                                         Json{{"closure_added", lf.closure_added},
                                              {"size", s.size()},
                                              {"family", family_to_json(s)}}));
        return 0;
      };
    });
  }
  {
    auto* c = family_cmd->add_subcommand("partition", "rank-partition checks on {1..N}");
    auto xi = std::make_shared<std::string>("1");
    auto n = std::make_shared<std::uint32_t>(8);
    auto format = std::make_shared<std::string>("json");
    c->add_option("--xi", *xi)->required();
    c->add_option("--N", *n)->required();
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        PartitionCheckReport rep = partition_check(Ordinal::parse(*xi), *n);
        Json config{{"xi", *xi}, {"N", *n}};
        Json sizes = Json::array();
        for (auto s : rep.stage_sizes) sizes.push_back(s);
        Json result{{"pass", rep.pass}, {"stages", rep.stage_count}, {"stage_sizes", sizes}};
        if (!rep.pass) result["failure"] = rep.failure;
        print_envelope(*format, envelope(0, config, result));
        return rep.pass ? 0 : 1;
      };
    });
  }

  // ---- spread ----
  auto* spread_cmd = app.add_subcommand("spread", "spreading constants and flattenings");
  spread_cmd->require_subcommand(1);
  {
    auto* c = spread_cmd->add_subcommand("constant", "certified spreading constant");
    auto a = std::make_shared<SpreadArgs>();
    c->add_option("--xi", a->xi, "admissibility index; comma list sweeps")->required();
    c->add_option("--norm", a->norm_path, "norm spec JSON file")->required();
    c->add_option("--basis", a->basis, "use the first N basis vectors; comma list sweeps");
    c->add_option("--vectors", a->vectors_path, "vector-list JSON file instead of --basis");
    c->add_option("--mode", a->mode, "convex | sphere");
    c->add_option("--scalars", a->scalars, "rational | float");
    c->add_option("--floor", a->floor, "only sets with min E past this index");
    c->add_option("--set-cap", a->set_cap, "bound on |E| during enumeration");
    c->add_option("--tolerance", a->tolerance, "float-mode gap target");
    c->add_option("--format", a->format, "json | csv | table");
    c->callback([=, &action] { action = [=] { return cmd_spread_constant(*a); }; });
  }
  {
    auto* c = spread_cmd->add_subcommand("flatten", "search for a flat admissible combination");
    auto a = std::make_shared<SpreadArgs>();
    c->add_option("--xi", a->xi)->required();
    c->add_option("--eps", a->eps, "flatness threshold")->required();
    c->add_option("--floor", a->floor);
    c->add_option("--norm", a->norm_path)->required();
    c->add_option("--basis", a->basis);
    c->add_option("--vectors", a->vectors_path);
    c->add_option("--scalars", a->scalars);
    c->add_option("--set-cap", a->set_cap);
    c->add_option("--tolerance", a->tolerance);
    c->add_option("--format", a->format);
    c->callback([=, &action] { action = [=] { return cmd_spread_flatten(*a); }; });
  }
  {
    auto* c = spread_cmd->add_subcommand("average", "average staged witnesses into one vector");
    auto path = std::make_shared<std::string>();
    auto m = std::make_shared<std::uint32_t>(1);
    auto format = std::make_shared<std::string>("json");
    c->add_option("--witnesses", *path, "stage-witness JSON file")->required();
    c->add_option("--m", *m, "stage count; blocks m+1..2m are averaged")->required();
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=] { return cmd_spread_average(*path, *m, *format); };
    });
  }

  // ---- verify ----
  {
    auto* c = app.add_subcommand("verify", "run a named verification suite");
    auto suite = std::make_shared<std::string>();
    auto opt = std::make_shared<SuiteOptions>();
    auto xi = std::make_shared<std::string>();
    auto format = std::make_shared<std::string>("json");
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    c->add_option("suite", *suite, "one of: " + names)->required();
    auto n_flag = std::make_shared<std::uint32_t>(0);
    c->add_option("--seed", opt->seed, "rng seed, echoed in the report");
    c->add_option("--max-E", opt->max_e);
    c->add_option("--max-sum", opt->max_sum);
    c->add_option("--N", *n_flag, "universe bound (composition and partition suites)");
    c->add_option("--xi", *xi, "restrict the partition suite to one index");
    c->add_option("--trials", opt->trials);
    c->add_option("--samples", opt->samples);
    c->add_option("--instances", opt->instances);
    c->add_option("--format", *format);
    c->callback([=, &action] {
      action = [=]() -> int {
        SuiteOptions o = *opt;
        if (*n_flag) {
          o.universe = *n_flag;
          o.partition_n = *n_flag;
        }
        if (!xi->empty()) o.xis = {Ordinal::parse(*xi)};
        SuiteResult r = run_suite(*suite, o);
        Json config{{"suite", *suite}, {"seed", o.seed}};
        print_envelope(*format, envelope(o.seed, config, r.report));
        return r.pass ? 0 : 1;
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e); // prints its own message
    return 2;
  }

  try {
    return action ? action() : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource cap: " << e.what() << "\n";
    return 3;
  } catch (const UndecidedError& e) {
    std::cerr << "undecided: " << e.what() << "\n";
    return 4;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal: " << e.what() << "\n";
    return 1;
  }
}

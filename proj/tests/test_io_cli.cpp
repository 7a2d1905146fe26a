#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "commands.hpp"
#include "oracles.hpp"
#include "specnav/io.hpp"
#include "specnav/runner.hpp"
#include "specnav/svg.hpp"

using namespace specnav;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("specnav-test-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string config(const std::string& name) { return (fs::path(SPECNAV_SOURCE_DIR) / "configs" / name).string(); }

// Small environment and episode files shared by the CLI tests.
struct Workspace {
  fs::path dir;
  std::string env;
  std::string episodes;

  explicit Workspace(const std::string& name, int count = 12, int augment = 0) : dir(scratch(name)) {
    env = (dir / "env.json").string();
    episodes = (dir / "episodes.json").string();
    EXPECT_EQ(run({"gen-env", "--seed", "3", "--out", env}).code, 0);
    EXPECT_EQ(run({"gen-episodes", "--seed", "3", "--env", env, "--out", episodes, "--count", std::to_string(count),
                   "--augment", std::to_string(augment)})
                  .code,
              0);
  }
};

/// Checks that every opened tag is closed in order.
bool well_formed(const std::string& xml) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = xml.find('<', pos)) != std::string::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = xml.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.starts_with('?') || tag.starts_with('!')) continue;
    if (tag.ends_with('/')) continue;
    if (tag.starts_with('/')) {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    stack.push_back(tag.substr(0, tag.find_first_of(" \t\n")));
  }
  return stack.empty();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (std::size_t p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

std::vector<Json> read_jsonl(const fs::path& path) {
  std::vector<Json> rows;
  std::istringstream in(read_text_file(path.string()));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) rows.push_back(Json::parse(line));
  }
  return rows;
}

}  // namespace

TEST(Io, EnvRoundTrip) {
  const EnvGraph env = generate_env(11, GeneratorParams{});
  const std::string text = dump_json(env_to_json(env));
  const EnvGraph back = env_from_json(Json::parse(text));
  EXPECT_EQ(dump_json(env_to_json(back)), text);
  EXPECT_EQ(back.node_count(), env.node_count());
  EXPECT_EQ(back.edge_count(), env.edge_count());
}

TEST(Io, EpisodeAndResultRoundTrip) {
  const EnvGraph env = generate_env(12, GeneratorParams{});
  const auto eps = generate_episodes(env, 1, 5);
  for (const auto& ep : eps) EXPECT_EQ(episode_from_json(episode_to_json(ep)), ep);

  const World world(env);
  PolicyConfig cfg;
  cfg.seed = 4;
  for (const auto& ep : eps) {
    const auto r = run_episode(world, ep, cfg);
    const auto back = result_from_json(Json::parse(dump_json(result_to_json(r))));
    EXPECT_EQ(back, r);
  }
  EXPECT_EQ(policy_from_json(policy_to_json(cfg)).name, cfg.name);
}

TEST(Io, SosRoundTripIsExact) {
  SosFeature f(2, 3, {0.1, 1.0 / 3.0, 0.0, 1e-300, 0.75, 2.0 / 7.0});
  EXPECT_EQ(sos_from_json(Json::parse(dump_json(sos_to_json(f)))), f);
}

TEST(Io, SchemaVersionMismatch) {
  Json doc = env_to_json(generate_env(13, GeneratorParams{}));
  doc["schema_version"] = 2;
  try {
    env_from_json(doc);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_STREQ(e.what(), "'specnav.env' schema_version 2 is not supported (expected 1)");
  }
  doc.erase("schema_version");
  EXPECT_THROW(env_from_json(doc), SchemaError);
  EXPECT_THROW(parse_json("{nope", "x"), SchemaError);
}

TEST(Io, TamperedEdgeWeightIsRejected) {
  Json doc = env_to_json(generate_env(14, GeneratorParams{}));
  doc["edges"][0]["weight"] = doc["edges"][0]["weight"].get<double>() + 0.5;
  EXPECT_THROW(env_from_json(doc), SchemaError);
}

TEST(Io, EmptyPolicyListIsConfigError) {
  const Json doc{{"schema", "specnav.config"}, {"schema_version", 1}, {"policies", Json::array()}};
  EXPECT_THROW(run_config_from_json(doc), ConfigError);
}

TEST(Io, DumpFormatsFloatsExactly) {
  const Json j{{"b", 0.1}, {"a", 1}, {"c", {1.5, 2}}};
  EXPECT_EQ(dump_json(j), R"({"a":1,"b":0.10000000000000001,"c":[1.5,2]})");
}

TEST(Runner, ParallelMatchesSerialAndIsOrdered) {
  const EnvGraph env = generate_env(15, GeneratorParams{});
  const World world(env);
  auto eps = generate_episodes(env, 2, 12);
  std::reverse(eps.begin(), eps.end());
  std::vector<PolicyConfig> policies(2);
  policies[0].name = "a";
  policies[1].name = "b";
  policies[1].exploit = ExploitPolicyKind::Random;
  const auto serial = run_batch(world, eps, policies, 1);
  const auto parallel = run_batch(world, eps, policies, 4);
  EXPECT_EQ(serial, parallel);
  ASSERT_EQ(serial.size(), 24u);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].episode_id, static_cast<int>(i / 2));
    EXPECT_EQ(serial[i].policy, i % 2 ? "b" : "a");
  }
  eps[0].env_id = "elsewhere";
  EXPECT_THROW(run_batch(world, eps, policies, 2), ConfigError);
}

TEST(Svg, ScatterAndHeatmap) {
  const std::string s = scatter_svg({{0.1, 0.2}, {0.5, 0.9}, {0.3, 0.3}}, "a < b & c", "x", "y");
  EXPECT_TRUE(well_formed(s));
  EXPECT_EQ(count(s, "<circle"), 3u);
  EXPECT_NE(s.find("a &lt; b &amp; c"), std::string::npos);
  EXPECT_THROW(scatter_svg({}, "t", "x", "y"), EmptyInput);

  SimilarityMatrix m;
  m.rows = 2;
  m.cols = 3;
  m.values = {0, 1, 2, 3, 4, 5};
  const std::string h = similarity_heatmap_svg(m, "t", {"a", "b", "c"}, {"r0", "r1"});
  EXPECT_TRUE(well_formed(h));
  EXPECT_EQ(count(h, "class=\"cell\""), 6u);
  EXPECT_FALSE(well_formed("<svg><g></svg>"));
}

TEST(Cli, RunIsByteDeterministic) {
  Workspace ws("determinism");
  const auto a = ws.dir / "a", b = ws.dir / "b";
  for (const auto& dir : {a, b}) {
    const auto r = run({"run", "--seed", "5", "--env", ws.env, "--episodes", ws.episodes, "--out-dir", dir.string(),
                        "--config", config("exploit_comparison.json"), "--jobs", dir == a ? "1" : "3"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  for (const char* f : {"results.jsonl", "metrics.json", "comparison.txt"}) {
    EXPECT_EQ(read_text_file((a / f).string()), read_text_file((b / f).string())) << f;
  }
  const auto rows = read_jsonl(a / "results.jsonl");
  EXPECT_EQ(rows.size(), 12u * 5u);
  for (const auto& row : rows) {
    EXPECT_EQ(row["schema"], "specnav.result");
    EXPECT_EQ(row["schema_version"], 1);
  }
}

TEST(Cli, OracleConfigSucceedsEverywhere) {
  Workspace ws("oracle");
  const auto out = ws.dir / "out";
  const auto r = run({"run", "--seed", "1", "--env", ws.env, "--episodes", ws.episodes, "--out-dir", out.string(),
                      "--config", config("oracle.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const Json metrics = Json::parse(read_text_file((out / "metrics.json").string()));
  EXPECT_EQ(metrics["schema"], "specnav.metrics");
  EXPECT_DOUBLE_EQ(metrics["policies"][0]["sr"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(metrics["policies"][0]["spl"].get<double>(), 1.0);
}

TEST(Cli, ErrorsAndExitCodes) {
  Workspace ws("errors", 3);
  const auto out = (ws.dir / "out").string();
  auto r = run({"run", "--seed", "1", "--env", ws.env, "--episodes", ws.episodes, "--out-dir", out, "--config",
                config("exploit_comparison.json"), "--policies", "spectral,teleport"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("teleport"), std::string::npos);
  EXPECT_NE(r.err.find("oracle, homing, spatial, spectral, random"), std::string::npos);

  r = run({"run", "--env", ws.env, "--episodes", ws.episodes, "--out-dir", out, "--config", config("oracle.json")});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);

  EXPECT_EQ(run({"run", "--seed", "x"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"gen-env", "--seed", "1", "--out", (ws.dir / "e.json").string(), "--nodes", "1"}).code, 2);

  Json doc = Json::parse(read_text_file(ws.env));
  doc["schema_version"] = 7;
  const auto bad = (ws.dir / "bad.json").string();
  write_text_file(bad, doc.dump());
  r = run({"run", "--seed", "1", "--env", bad, "--episodes", ws.episodes, "--out-dir", out, "--config",
           config("oracle.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("schema_version 7"), std::string::npos);

  r = run({"run", "--seed", "1", "--env", (ws.dir / "missing.json").string(), "--episodes", ws.episodes,
           "--out-dir", out, "--config", config("oracle.json")});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, ScoreNdsStudy) {
  Workspace ws("study", 10, 6);
  const auto out = ws.dir / "out";
  const auto r = run({"study-score-nds", "--seed", "2", "--env", ws.env, "--episodes", ws.episodes, "--out-dir",
                      out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_jsonl(out / "score_nds.jsonl");
  ASSERT_FALSE(rows.empty());
  std::vector<double> scores, nds_values;
  bool has_identity = false;
  for (const auto& row : rows) {
    scores.push_back(row["nav_score"].get<double>());
    nds_values.push_back(row["nds"].get<double>());
    has_identity |= nds_values.back() == 1.0;
  }
  EXPECT_TRUE(has_identity);
  const Json summary = Json::parse(read_text_file((out / "score_nds_summary.json").string()));
  EXPECT_EQ(summary["points"].get<std::size_t>(), rows.size());
  EXPECT_NEAR(summary["spearman"].get<double>(), oracle::naive_spearman(scores, nds_values), 1e-9);
  const std::string svg = read_text_file((out / "score_nds.svg").string());
  EXPECT_TRUE(well_formed(svg));
  EXPECT_EQ(count(svg, "<circle"), rows.size());
}

TEST(Cli, PlotSimilarityMatrix) {
  Workspace ws("plot", 4);
  const auto svg = (ws.dir / "m.svg").string(), grid = (ws.dir / "m.json").string();
  std::vector<std::string> args{"plot-simmatrix", "--env", ws.env, "--episodes", ws.episodes, "--episode-id", "1",
                                "--out", svg, "--grid-out", grid};
  ASSERT_EQ(run(args).code, 0);
  const std::string first = read_text_file(svg), first_grid = read_text_file(grid);
  EXPECT_TRUE(well_formed(first));
  ASSERT_EQ(run(args).code, 0);
  EXPECT_EQ(read_text_file(svg), first);
  EXPECT_EQ(read_text_file(grid), first_grid);

  const Json g = Json::parse(first_grid);
  EXPECT_EQ(count(first, "class=\"cell\""), g["values"].size());

  args.push_back("--trajectory=");
  EXPECT_NE(run(args).code, 0);
  args.back() = "--episode-id";
  args.push_back("999");
  EXPECT_EQ(run(args).code, 2);
}

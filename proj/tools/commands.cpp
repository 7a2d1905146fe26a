#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "specnav/io.hpp"
#include "specnav/runner.hpp"
#include "specnav/study.hpp"
#include "specnav/svg.hpp"

namespace specnav::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string env_path;
  std::string episodes_path;
  std::string config_path;
  std::string out_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string policies;
  int jobs = 1;

  GeneratorParams gen;
  std::string env_id;
  int episode_count = 100;
  EpisodeParams episode;
  int augment_per_episode = 0;
  int max_hops = 15;

  int per_episode = 5;
  int eta = 0;

  int episode_id = 0;
  std::optional<std::string> trajectory;
  std::string grid_out;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<NodeId> parse_nodes(const std::string& s) {
  std::vector<NodeId> out;
  for (const auto& item : split_list(s)) {
    try {
      std::size_t used = 0;
      out.push_back(static_cast<NodeId>(std::stoi(item, &used)));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad node id '" + item + "' in trajectory");
    }
  }
  return out;
}

std::uint64_t seed_of(const Options& o) {
  if (!o.seed) throw ConfigError("--seed is required");
  return *o.seed;
}

void ensure_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("--out-dir is required");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir + ": " + ec.message());
}

struct Inputs {
  EnvGraph env;
  EpisodeSet episodes;
};

Inputs load_inputs(const Options& o) {
  if (o.env_path.empty()) throw ConfigError("--env is required");
  if (o.episodes_path.empty()) throw ConfigError("--episodes is required");
  Inputs in{load_env(o.env_path), load_episode_set(o.episodes_path)};
  if (in.episodes.env_id != in.env.env_id()) {
    throw ConfigError("episode file is for '" + in.episodes.env_id + "' but the environment is '" +
                      in.env.env_id() + "'");
  }
  for (const auto& ep : in.episodes.episodes) {
    for (NodeId v : ep.gt_path) {
      if (!in.env.contains(v)) throw SchemaError("episode " + std::to_string(ep.id) + " names unknown node");
    }
  }
  return in;
}

int resolve_eta(int requested, const EnvGraph& env) { return requested > 0 ? requested : default_eta(env.pano_dims().width); }

std::string fixed(double v, int digits = 3) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string comparison_table(const std::vector<std::pair<std::string, MetricSummary>>& rows) {
  std::size_t width = 6;
  for (const auto& [name, m] : rows) width = std::max(width, name.size());
  auto pad = [](std::string s, std::size_t w) {
    s.resize(std::max(s.size(), w), ' ');
    return s;
  };
  std::string s = pad("policy", width) + "  episodes     SR    SPL    OSR      TL      NE   FSPL\n";
  for (const auto& [name, m] : rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %8zu  %5.3f  %5.3f  %5.3f  %6.2f  %6.2f  %5.3f\n", m.episodes, m.sr, m.spl, m.osr,
                  m.tl, m.ne, m.fspl);
    s += pad(name, width) + line;
  }
  return s;
}

// ---------------------------------------------------------------------------

void cmd_gen_env(const Options& o, std::ostream& out) {
  if (o.out_path.empty()) throw ConfigError("--out is required");
  const EnvGraph env = generate_env(seed_of(o), o.gen, o.env_id);
  write_text_file(o.out_path, dump_json(env_to_json(env), 1) + "\n");
  out << "wrote " << o.out_path << " (" << env.node_count() << " nodes, " << env.edge_count() << " edges, "
      << env.objects().size() << " objects)\n";
}

void cmd_gen_episodes(const Options& o, std::ostream& out) {
  if (o.env_path.empty()) throw ConfigError("--env is required");
  if (o.out_path.empty()) throw ConfigError("--out is required");
  if (o.episode_count < 1) throw ConfigError("--count must be at least 1");
  const EnvGraph env = load_env(o.env_path);
  const std::uint64_t seed = seed_of(o);
  EpisodeSet set;
  set.env_id = env.env_id();
  set.episodes = generate_episodes(env, seed, o.episode_count, o.episode);
  if (o.augment_per_episode > 0) {
    set.augmented = true;
    set.trajectories = augment_trajectories(env, set.episodes, seed, o.augment_per_episode, o.max_hops);
  }
  write_text_file(o.out_path, dump_json(episode_set_to_json(set), 1) + "\n");
  out << "wrote " << o.out_path << " (" << set.episodes.size() << " episodes";
  if (set.augmented) out << ", " << set.trajectories.size() << " augmented trajectories";
  out << ")\n";
}

void cmd_run(const Options& o, std::ostream& out) {
  if (o.config_path.empty()) throw ConfigError("--config is required");
  const std::uint64_t seed = seed_of(o);
  RunConfig rc = load_run_config(o.config_path);
  const Inputs in = load_inputs(o);
  ensure_dir(o.out_dir);

  std::set<std::string> seen;
  for (const auto& p : rc.policies) {
    if (!seen.insert(p.name).second) throw ConfigError("duplicate policy name '" + p.name + "'");
  }
  std::vector<PolicyConfig> selected;
  if (o.policies.empty()) {
    selected = rc.policies;
  } else {
    for (const auto& name : split_list(o.policies)) {
      const auto it = std::find_if(rc.policies.begin(), rc.policies.end(), [&](const auto& p) { return p.name == name; });
      if (it == rc.policies.end()) {
        std::string valid;
        for (const auto& p : rc.policies) valid += (valid.empty() ? "" : ", ") + p.name;
        throw ConfigError("unknown policy '" + name + "' (valid: " + valid + ")");
      }
      selected.push_back(*it);
    }
  }
  for (auto& p : selected) p.seed = seed;

  const World world(in.env, resolve_eta(rc.eta, in.env));
  const auto results = run_batch(world, in.episodes.episodes, selected, o.jobs);

  std::string stream;
  for (const auto& r : results) stream += dump_json(result_to_json(r)) + "\n";
  write_text_file((fs::path(o.out_dir) / "results.jsonl").string(), stream);

  std::vector<std::pair<std::string, MetricSummary>> rows;
  Json per_policy = Json::array();
  for (const auto& p : selected) {
    std::vector<EpisodeResult> mine;
    for (const auto& r : results) {
      if (r.policy == p.name) mine.push_back(r);
    }
    const MetricSummary m = summarize(mine);
    rows.emplace_back(p.name, m);
    Json entry = metrics_to_json(m);
    entry["policy"] = policy_to_json(p);
    per_policy.push_back(entry);
  }
  const Json metrics{{"schema", kMetricsSchema}, {"schema_version", kSchemaVersion},
                     {"env_id", in.env.env_id()}, {"seed", seed},
                     {"eta", world.eta()},        {"policies", per_policy}};
  write_text_file((fs::path(o.out_dir) / "metrics.json").string(), dump_json(metrics, 1) + "\n");
  const std::string table = comparison_table(rows);
  write_text_file((fs::path(o.out_dir) / "comparison.txt").string(), table);
  out << table;
}

void cmd_study_score_nds(const Options& o, std::ostream& out) {
  const std::uint64_t seed = seed_of(o);
  const Inputs in = load_inputs(o);
  ensure_dir(o.out_dir);
  if (in.episodes.episodes.empty()) throw EmptyInput("episode file holds no episodes");
  const World world(in.env, resolve_eta(o.eta, in.env));

  ScoreNdsStudy study;
  if (in.episodes.augmented && !in.episodes.trajectories.empty()) {
    for (const auto& t : in.episodes.trajectories) {
      if (t.episode_index < 0 || static_cast<std::size_t>(t.episode_index) >= in.episodes.episodes.size()) {
        throw SchemaError("augmented trajectory refers to a missing episode");
      }
    }
    study.points = score_nds_points(world, in.episodes.episodes, in.episodes.trajectories);
    study.spearman = points_spearman(study.points);
  } else {
    study = score_nds_study(world, in.episodes.episodes, seed, o.per_episode, o.max_hops);
  }
  if (study.points.empty()) throw EmptyInput("no trajectories to study");

  std::string stream;
  std::vector<std::pair<double, double>> xy;
  for (const auto& p : study.points) {
    stream += dump_json({{"episode_id", p.episode_id},
                         {"kind", to_string(p.kind)},
                         {"nodes", p.nodes},
                         {"nav_score", p.nav_score},
                         {"nds", p.nds}}) +
              "\n";
    xy.emplace_back(p.nav_score, p.nds);
  }
  write_text_file((fs::path(o.out_dir) / "score_nds.jsonl").string(), stream);
  const Json summary{{"schema", "specnav.score_nds"}, {"schema_version", kSchemaVersion}, {"env_id", in.env.env_id()},
                     {"seed", seed}, {"points", study.points.size()}, {"spearman", study.spearman}};
  write_text_file((fs::path(o.out_dir) / "score_nds_summary.json").string(), dump_json(summary, 1) + "\n");
  write_text_file((fs::path(o.out_dir) / "score_nds.svg").string(),
                  scatter_svg(xy, "navigation score vs nDS (" + in.env.env_id() + ")", "navigation score", "nDS"));
  out << "points " << study.points.size() << "  spearman " << fixed(study.spearman, 4) << "\n";
}

void cmd_plot_simmatrix(const Options& o, std::ostream& out) {
  if (o.out_path.empty()) throw ConfigError("--out is required");
  const Inputs in = load_inputs(o);
  const auto& eps = in.episodes.episodes;
  const auto it = std::find_if(eps.begin(), eps.end(), [&](const Episode& e) { return e.id == o.episode_id; });
  if (it == eps.end()) throw ConfigError("no episode with id " + std::to_string(o.episode_id));
  const std::vector<NodeId> traj = o.trajectory ? parse_nodes(*o.trajectory) : it->gt_path;
  if (traj.empty()) throw EmptyInput("trajectory is empty");
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (!in.env.contains(traj[i])) throw ConfigError("trajectory names unknown node " + std::to_string(traj[i]));
    if (i > 0 && traj[i] != traj[i - 1] && !in.env.has_edge(traj[i - 1], traj[i])) {
      throw ConfigError("trajectory steps between non-adjacent nodes");
    }
  }
  const World world(in.env, resolve_eta(o.eta, in.env));
  const auto refs = world.references(it->instruction);
  const auto feats = world.features(traj);
  const SimilarityMatrix m = similarity_matrix(refs, feats);
  std::vector<std::string> cols, rows;
  for (int tok : it->instruction.tokens) cols.push_back("c" + std::to_string(tok));
  for (NodeId v : traj) rows.push_back("v" + std::to_string(v));
  const double score = nav_score(refs, feats);
  write_text_file(o.out_path, similarity_heatmap_svg(m, "episode " + std::to_string(it->id) + "  S_nav " +
                                                            fixed(score, 4), cols, rows));
  if (!o.grid_out.empty()) {
    const Json grid{{"episode_id", it->id}, {"trajectory", traj}, {"tokens", it->instruction.tokens},
                    {"shape", {m.rows, m.cols}}, {"values", m.values}, {"nav_score", score}};
    write_text_file(o.grid_out, dump_json(grid) + "\n");
  }
  out << "wrote " << o.out_path << " (" << m.rows << "x" << m.cols << ", nav score " << fixed(score, 4) << ")\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral-feature navigation benchmark", "specnav"};
  app.require_subcommand(1);
  Options o;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", o.seed, "Global seed; all randomness derives from it")->envname("SPECNAV_SEED");
  };
  auto add_env = [&](CLI::App* cmd) {
    cmd->add_option("--env", o.env_path, "Environment file")->envname("SPECNAV_ENV");
  };
  auto add_episodes = [&](CLI::App* cmd) {
    cmd->add_option("--episodes", o.episodes_path, "Episode file")->envname("SPECNAV_EPISODES");
  };
  auto add_out_dir = [&](CLI::App* cmd) {
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->envname("SPECNAV_OUT_DIR");
  };

  auto* gen_env = app.add_subcommand("gen-env", "Generate a procedural indoor environment");
  add_seed(gen_env);
  gen_env->add_option("--out", o.out_path, "Output file");
  gen_env->add_option("--nodes", o.gen.node_count, "Viewpoint count");
  gen_env->add_option("--rooms", o.gen.room_count, "Room count");
  gen_env->add_option("--categories", o.gen.category_count, "Object category count");
  gen_env->add_option("--pano-width", o.gen.pano.width, "Panorama columns");
  gen_env->add_option("--pano-height", o.gen.pano.height, "Panorama rows");
  gen_env->add_option("--env-id", o.env_id, "Identifier stored in the file (default env-<seed>)");

  auto* gen_eps = app.add_subcommand("gen-episodes", "Sample episodes in an environment");
  add_seed(gen_eps);
  add_env(gen_eps);
  gen_eps->add_option("--out", o.out_path, "Output file");
  gen_eps->add_option("--count", o.episode_count, "Number of episodes");
  gen_eps->add_option("--min-hops", o.episode.min_hops, "Preferred minimum path length in hops");
  gen_eps->add_option("--d-success", o.episode.d_success, "Success radius in meters");
  gen_eps->add_option("--augment", o.augment_per_episode, "Augmented trajectories per episode (0 for none)");
  gen_eps->add_option("--max-hops", o.max_hops, "Length cap for augmented trajectories");

  auto* run = app.add_subcommand("run", "Run policies over an episode set");
  add_seed(run);
  add_env(run);
  add_episodes(run);
  add_out_dir(run);
  run->add_option("--config", o.config_path, "Policy configuration file")->envname("SPECNAV_CONFIG");
  run->add_option("--policies", o.policies, "Comma separated subset of configured policy names")
      ->envname("SPECNAV_POLICIES");
  run->add_option("--jobs", o.jobs, "Worker threads")->envname("SPECNAV_JOBS");

  auto* study = app.add_subcommand("study-score-nds", "Relate navigation scores to nDS");
  add_seed(study);
  add_env(study);
  add_episodes(study);
  add_out_dir(study);
  study->add_option("--per-episode", o.per_episode, "Augmented trajectories per episode");
  study->add_option("--max-hops", o.max_hops, "Length cap for augmented trajectories");
  study->add_option("--eta", o.eta, "Horizontal frequencies kept (0 for width/4)");

  auto* plot = app.add_subcommand("plot-simmatrix", "Heatmap of step-to-token spectral similarity");
  add_env(plot);
  add_episodes(plot);
  plot->add_option("--episode-id", o.episode_id, "Episode to plot");
  plot->add_option("--trajectory", o.trajectory, "Comma separated node ids (default: ground-truth path)");
  plot->add_option("--out", o.out_path, "Output SVG");
  plot->add_option("--grid-out", o.grid_out, "Also write the numeric matrix as JSON");
  plot->add_option("--eta", o.eta, "Horizontal frequencies kept (0 for width/4)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen_env) cmd_gen_env(o, out);
    else if (*gen_eps) cmd_gen_episodes(o, out);
    else if (*run) cmd_run(o, out);
    else if (*study) cmd_study_score_nds(o, out);
    else if (*plot) cmd_plot_simmatrix(o, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
  } catch (const NoPath& e) {
    err << "configuration error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace specnav::cli

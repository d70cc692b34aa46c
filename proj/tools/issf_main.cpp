#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "issf/benchmark.hpp"
#include "issf/errors.hpp"
#include "issf/service_pool.hpp"
#include "issf/trainer.hpp"

using namespace issf;
using nlohmann::json;

namespace {

// 0 success, 1 bad input, 2 runtime failure (damaged artifacts, I/O).
int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const UnknownIdError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const RoleMismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ShapeMismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const AdversaryRequiredError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InsufficientServicesError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const DuplicateIdError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const LineageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NotFoundError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Error& e) {  // corrupt blobs, hash mismatches, pool I/O
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
}

std::string default_pool_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("ISSF_POOL")) return env;
  return {};
}

ServicePool open_pool(const std::string& flag) {
  std::string path = default_pool_path(flag);
  if (path.empty())
    throw ValidationError("no service pool configured; pass --pool or set ISSF_POOL");
  return ServicePool(path);
}

// ---------------------------------------------------------------------------
// env validate

struct ValidateOpts {
  std::string scenario;
  bool as_json = false;
};

int cmd_env_validate(const ValidateOpts& opts) {
  DynamicAccessGraph graph;
  try {
    graph = load_graph(opts.scenario);
  } catch (const Error& e) {
    if (opts.as_json) {
      std::cout << json{{"valid", false}, {"error", e.what()}}.dump(2) << '\n';
    } else {
      std::cerr << "invalid: " << e.what() << '\n';
    }
    return 1;
  }

  int locals = static_cast<int>(graph.local_toolkit().size());
  int remotes = static_cast<int>(graph.remote_toolkit().size());
  if (opts.as_json) {
    std::cout << json{{"valid", true},
                      {"scenario", graph.scenario_id()},
                      {"content_hash", graph.content_hash()},
                      {"nodes", graph.node_count()},
                      {"credentials", graph.credential_count()},
                      {"goal_nodes", graph.goal_nodes().size()},
                      {"landing_nodes", graph.landing_nodes().size()},
                      {"edges", graph.edges().size()},
                      {"toolkit", {{"local", locals}, {"remote", remotes}}},
                      {"max_episode_length", graph.config().max_episode_length}}
                     .dump(2)
              << '\n';
    return 0;
  }

  auto count = [](std::size_t n, const char* noun) {
    return std::to_string(n) + " " + noun + (n == 1 ? "" : "s");
  };
  std::cout << "scenario '" << graph.scenario_id() << "': ok\n";
  std::cout << count(graph.node_count(), "node") << ", "
            << count(graph.credential_count(), "credential") << ", "
            << count(graph.goal_nodes().size(), "goal node") << ", "
            << count(graph.landing_nodes().size(), "landing node") << '\n';
  std::cout << count(graph.edges().size(), "derived edge") << ", " << graph.toolkit_count()
            << (graph.toolkit_count() == 1 ? " toolkit vulnerability ("
                                           : " toolkit vulnerabilities (")
            << locals << " local, " << remotes << " remote)\n";
  std::cout << "content hash " << graph.content_hash() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainOpts {
  std::string scenario;
  std::string pool;
  std::string plan;
  std::string id;
  std::string role = "attacker";
  std::string algo = "qlearning";
  std::string adversary = "NA";
  std::string pretrain = "NA";
  std::uint64_t seed = 0;
  long timesteps = -1;
  bool stochastic_adversaries = false;
  bool as_json = false;
};

int cmd_train(const TrainOpts& opts) {
  auto graph = load_graph(opts.scenario);
  ServicePool pool = open_pool(opts.pool);

  TrainingPlan plan;
  if (!opts.plan.empty()) {
    plan = load_training_plan(opts.plan);
  } else {
    PlanEntry entry;
    entry.role = role_from_string(opts.role);
    entry.config.algorithm = algorithm_from_string(opts.algo);
    entry.config.seed = opts.seed;
    if (opts.timesteps >= 0) entry.config.total_timesteps = opts.timesteps;
    entry.adversaries = split_adversary_field(opts.adversary);
    entry.pretrain = opts.pretrain;
    entry.stochastic_adversaries = opts.stochastic_adversaries;
    entry.id = opts.id.empty() ? opts.role + "-" + opts.algo + "-s" + std::to_string(opts.seed)
                               : opts.id;
    plan.entries.push_back(std::move(entry));
  }

  auto published = run_training_plan(graph, plan, pool);

  if (opts.as_json) {
    json out = json::array();
    for (const auto& id : published) out.push_back(manifest_to_json(pool.manifest(id)));
    std::cout << json{{"published", out}}.dump(2) << '\n';
    return 0;
  }
  for (const auto& id : published) {
    auto manifest = pool.manifest(id);
    auto model = pool.load_model(id);
    std::cout << "published '" << id << "' (" << to_string(manifest.role) << ", "
              << manifest.algorithm << ", " << model->train_steps() << " steps";
    if (manifest.adversary != "NA") std::cout << ", vs " << manifest.adversary;
    if (manifest.pretrain != "NA") std::cout << ", from " << manifest.pretrain;
    std::cout << ")\n";
  }
  std::cout << "pool " << pool.root().string() << " now holds " << pool.ids().size()
            << " service(s)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
  std::string scenario;
  std::string pool;
  std::string attacker;
  std::string defender;
  int episodes = 50;
  std::uint64_t seed = 0;
  int parallel = 1;
  int max_length = -1;
  std::string trace_out;
  bool as_json = false;
};

AttackerFactory attacker_factory(const std::string& name, const std::string& pool_flag,
                                 const DynamicAccessGraph& graph) {
  if (name == "NA") throw ValidationError("the attacker side cannot be 'NA'");
  if (name == "random") {
    return [] { return std::make_unique<RandomAttackerAgent>(); };
  }
  ServicePool pool = open_pool(pool_flag);
  std::shared_ptr<ActionDecisionModel> model = pool.load_model(name);
  check_model_role(*model, Role::Attacker);
  check_model_fits(*model, graph);
  return [model, &graph] { return std::make_unique<ModelAttackerAgent>(model, graph); };
}

DefenderFactory defender_factory(const std::string& name, const std::string& pool_flag,
                                 const DynamicAccessGraph& graph) {
  if (name == "NA") {
    return [] { return std::make_unique<NullDefenderAgent>(); };
  }
  if (name == "random") {
    return [] { return std::make_unique<RandomDefenderAgent>(); };
  }
  ServicePool pool = open_pool(pool_flag);
  std::shared_ptr<ActionDecisionModel> model = pool.load_model(name);
  check_model_role(*model, Role::Defender);
  check_model_fits(*model, graph);
  return [model, &graph] { return std::make_unique<ModelDefenderAgent>(model, graph); };
}

int cmd_simulate(const SimulateOpts& opts) {
  if (opts.episodes < 1) throw ValidationError("--episodes must be >= 1");
  auto graph = load_graph(opts.scenario);

  SimulateOptions sim;
  sim.parallel = opts.parallel;
  if (opts.max_length > 0) sim.episode.max_length = opts.max_length;

  std::ofstream trace_stream;
  if (!opts.trace_out.empty()) {
    trace_stream.open(opts.trace_out, std::ios::trunc);
    if (!trace_stream) throw ValidationError("cannot open trace file '" + opts.trace_out + "'");
    sim.on_episode = [&](const EpisodeTrace& trace) {
      write_trace_jsonl(graph, trace, trace_stream);
    };
  }

  auto metrics = simulate(graph, attacker_factory(opts.attacker, opts.pool, graph),
                          defender_factory(opts.defender, opts.pool, graph), opts.episodes,
                          opts.seed, sim);

  if (opts.as_json) {
    json out = metrics_to_json(metrics);
    out["scenario"] = graph.scenario_id();
    out["seed"] = opts.seed;
    out["attacker"] = opts.attacker;
    out["defender"] = opts.defender;
    std::cout << out.dump(2) << '\n';
    return 0;
  }

  std::cout << std::fixed << std::setprecision(2);
  std::cout << opts.attacker << " vs " << opts.defender << " on '" << graph.scenario_id()
            << "', " << metrics.episodes << " episodes (seed " << opts.seed << ")\n";
  std::cout << std::left << std::setw(26) << "avg episode length" << metrics.ael << '\n';
  std::cout << std::setw(26) << "avg attacker reward" << metrics.aer_attacker << '\n';
  std::cout << std::setw(26) << "avg defender reward" << metrics.aer_defender << '\n';
  std::cout << std::setw(26) << "attacker win rate" << metrics.attacker_win_rate << '\n';
  std::cout << std::setw(26) << "end posture"
            << "discovered " << metrics.mean_discovered << ", owned " << metrics.mean_owned
            << ", suspicious " << metrics.mean_suspicious << '\n';
  std::cout << "actions (success/failure/invalid)\n";
  for (ActionKind kind : {ActionKind::LocalAttack, ActionKind::RemoteAttack, ActionKind::Connect,
                          ActionKind::Scan, ActionKind::Restore, ActionKind::Remediate}) {
    const TallyRow& row = metrics.tally.row(kind);
    std::cout << "  " << std::setw(24) << to_string(kind) << row.success << '/' << row.failure
              << '/' << row.invalid << '\n';
  }
  if (!opts.trace_out.empty())
    std::cout << "trace written to " << opts.trace_out << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// benchmark

struct BenchmarkOpts {
  std::string scenario;
  std::string pool;
  std::vector<std::string> services;
  int sims = 25;
  int episodes = 50;
  std::uint64_t seed = 0;
  int parallel = 1;
  bool as_json = false;
};

int cmd_benchmark(const BenchmarkOpts& opts) {
  auto graph = load_graph(opts.scenario);
  ServicePool pool = open_pool(opts.pool);

  std::vector<TournamentService> services;
  for (const auto& id : opts.services) {
    std::shared_ptr<ActionDecisionModel> model = pool.load_model(id);
    check_model_fits(*model, graph);
    TournamentService service;
    service.id = id;
    service.role = model->role();
    if (model->role() == Role::Attacker)
      service.attacker = [model, &graph] { return std::make_unique<ModelAttackerAgent>(model, graph); };
    else
      service.defender = [model, &graph] { return std::make_unique<ModelDefenderAgent>(model, graph); };
    services.push_back(std::move(service));
  }

  TournamentOptions options;
  options.simulations_per_pairing = opts.sims;
  options.episodes_per_simulation = opts.episodes;
  options.base_seed = opts.seed;
  options.parallel = opts.parallel;

  auto report = run_tournament(graph, services, options);

  if (opts.as_json) {
    std::cout << tournament_report_to_json(report).dump(2) << '\n';
    return 0;
  }
  std::cout << "tournament on '" << graph.scenario_id() << "', ELO initial 1000, K-factor 32, "
            << report.options.simulations_per_pairing << " sims x "
            << report.options.episodes_per_simulation << " episodes (seed " << opts.seed
            << ")\n";
  std::cout << report.attacker_matches << " attacker matches, " << report.defender_matches
            << " defender matches\n\n";
  std::cout << render_leaderboard(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"issf: adversarial security service simulator"};
  app.require_subcommand(1);
  int rc = 0;

  auto* env = app.add_subcommand("env", "scenario utilities");
  env->require_subcommand(1);
  ValidateOpts validate_opts;
  auto* validate = env->add_subcommand("validate", "parse and validate a scenario document");
  validate->add_option("scenario", validate_opts.scenario, "scenario json file")->required();
  validate->add_flag("--json", validate_opts.as_json, "machine-readable output");
  validate->callback([&] { rc = run_guarded([&] { return cmd_env_validate(validate_opts); }); });

  TrainOpts train_opts;
  auto* train = app.add_subcommand("train", "train security services and publish them");
  train->add_option("--scenario", train_opts.scenario, "scenario json file")->required();
  train->add_option("--pool", train_opts.pool, "service pool directory (or ISSF_POOL)");
  train->add_option("--plan", train_opts.plan, "training plan json file");
  train->add_option("--id", train_opts.id, "service id (default derived from role/algo/seed)");
  train->add_option("--role", train_opts.role, "attacker or defender")
      ->check(CLI::IsMember({"attacker", "defender"}));
  train->add_option("--algo", train_opts.algo, "random, qlearning or policy_gradient");
  train->add_option("--adversary", train_opts.adversary,
                    "adversary service id(s), comma-joined, or NA");
  train->add_option("--pretrain", train_opts.pretrain, "service id to fine-tune from, or NA");
  train->add_option("--seed", train_opts.seed, "training seed");
  train->add_option("--timesteps", train_opts.timesteps, "override total timesteps");
  train->add_flag("--stochastic-adversaries", train_opts.stochastic_adversaries,
                  "sample adversary policies instead of playing them greedily");
  train->add_flag("--json", train_opts.as_json, "machine-readable output");
  train->callback([&] { rc = run_guarded([&] { return cmd_train(train_opts); }); });

  SimulateOpts sim_opts;
  auto* sim = app.add_subcommand("simulate", "run seeded episodes and report metrics");
  sim->add_option("--scenario", sim_opts.scenario, "scenario json file")->required();
  sim->add_option("--pool", sim_opts.pool, "service pool directory (or ISSF_POOL)");
  sim->add_option("--attacker", sim_opts.attacker, "attacker service id or 'random'")
      ->required();
  sim->add_option("--defender", sim_opts.defender, "defender service id, 'random' or 'NA'")
      ->required();
  sim->add_option("--episodes", sim_opts.episodes, "episode count");
  sim->add_option("--seed", sim_opts.seed, "base seed; episode i runs on derive(seed, i)");
  sim->add_option("--parallel", sim_opts.parallel, "worker threads");
  sim->add_option("--max-length", sim_opts.max_length, "override the scenario episode cap");
  sim->add_option("--trace-out", sim_opts.trace_out, "write episode traces as json lines");
  sim->add_flag("--json", sim_opts.as_json, "machine-readable output");
  sim->callback([&] { rc = run_guarded([&] { return cmd_simulate(sim_opts); }); });

  BenchmarkOpts bench_opts;
  auto* bench = app.add_subcommand("benchmark", "round-robin ELO tournament over pool services");
  bench->add_option("--scenario", bench_opts.scenario, "scenario json file")->required();
  bench->add_option("--pool", bench_opts.pool, "service pool directory (or ISSF_POOL)");
  bench->add_option("--services", bench_opts.services, "pool service ids")
      ->required()
      ->delimiter(',');
  bench->add_option("--sims", bench_opts.sims, "simulations per pairing");
  bench->add_option("--episodes", bench_opts.episodes, "episodes per simulation");
  bench->add_option("--seed", bench_opts.seed, "tournament base seed");
  bench->add_option("--parallel", bench_opts.parallel, "worker threads");
  bench->add_flag("--json", bench_opts.as_json, "machine-readable output");
  bench->callback([&] { rc = run_guarded([&] { return cmd_benchmark(bench_opts); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage problems are exit 1, --help is success
  }
  return rc;
}

#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "splitmax/diagnostics.hpp"
#include "splitmax/harness.hpp"

using namespace splitmax;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct RunArgs {
  std::string instance;
  std::size_t users = 100;
  std::size_t billboards = 4;
  std::size_t edges = 200;
  std::size_t checkins = 3;
  double extent = 2000.0;
  double hours = 4.0;
  Timestamp delta = 3600;
  double seed_cost_k = 1000.0;
  std::vector<std::string> algorithms{"rg", "tpg", "random", "topk", "hdh", "pagerank"};
  std::vector<double> budgets;
  std::string prob_model;
  double pc = 0.1;
  double epsilon = 0.01;
  double lambda = 0.0;
  std::size_t simulations = 1000;
  std::uint64_t seed = 42;
  bool exact = false;
  bool full_sampling = false;
  std::string merge = "rank";
  std::string out;
  std::string trace;
  std::string plot;
  std::string plot_out;
};

struct GenArgs {
  std::size_t users = 100;
  std::size_t billboards = 4;
  std::size_t edges = 200;
  std::size_t checkins = 3;
  double extent = 2000.0;
  double hours = 4.0;
  Timestamp delta = 3600;
  double lambda = 100.0;
  std::string prob_model = "wc";
  double pc = 0.1;
  double seed_cost_k = 1000.0;
  double budget = 1000.0;
  std::uint64_t seed = 42;
  bool small = false;
  std::size_t slots = 4;
  std::string out;
};

struct DiagnoseArgs {
  std::string instance;
  std::size_t max_elems = 10;
  double budget = -1.0;
};

void add_synthetic_options(CLI::App* app, std::size_t& users, std::size_t& billboards,
                           std::size_t& edges, std::size_t& checkins, double& extent,
                           double& hours, Timestamp& delta, double& seed_cost_k) {
  app->add_option("--users", users, "Synthetic user count");
  app->add_option("--billboards", billboards, "Synthetic billboard count");
  app->add_option("--edges", edges, "Synthetic edge count");
  app->add_option("--checkins,--checkins_per_user", checkins, "Check-ins per user");
  app->add_option("--extent", extent, "Side of the synthetic area in meters");
  app->add_option("--hours", hours, "Horizon length in hours");
  app->add_option("--delta,--delta_slot", delta, "Slot length in seconds");
  app->add_option("--seed-cost-k,--seed_cost_k", seed_cost_k, "Seed cost scale k");
}

SyntheticParams synthetic_params(std::size_t users, std::size_t billboards, std::size_t edges,
                                 std::size_t checkins, double extent, double hours,
                                 Timestamp delta, double seed_cost_k, std::uint64_t seed) {
  SyntheticParams p;
  p.users = users;
  p.billboards = billboards;
  p.edges = edges;
  p.checkins_per_user = checkins;
  p.extent = extent;
  p.horizon = {0, static_cast<Timestamp>(hours * 3600.0)};
  p.delta_slot = delta;
  p.seed_cost_k = seed_cost_k;
  p.rng_seed = seed;
  return p;
}

std::ofstream open_file(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot write");
  return out;
}

int do_run(const RunArgs& a) {
  ExperimentConfig cfg;
  if (!a.instance.empty()) cfg.instance_dir = a.instance;
  cfg.synthetic = synthetic_params(a.users, a.billboards, a.edges, a.checkins, a.extent,
                                   a.hours, a.delta, a.seed_cost_k, a.seed);
  cfg.budgets = a.budgets;
  for (const auto& name : a.algorithms) cfg.algorithms.push_back(parse_algorithm(name));
  if (!a.prob_model.empty()) cfg.prob_model = a.prob_model;
  cfg.pc = a.pc;
  cfg.epsilon = a.epsilon;
  if (a.lambda > 0.0) cfg.lambda = a.lambda;
  cfg.simulations = a.simulations;
  cfg.rng_seed = a.seed;
  cfg.exact = a.exact;
  cfg.full_sampling = a.full_sampling;
  cfg.merge = parse_merge_rule(a.merge);
  validate(cfg);

  const auto instance = materialize_instance(cfg);
  const auto cells = run_cells(cfg, instance);
  std::vector<ResultRow> rows;
  for (const auto& c : cells) rows.push_back(c.row);

  if (a.out.empty()) {
    write_results_csv(std::cout, rows);
  } else {
    auto out = open_file(a.out);
    write_results_csv(out, rows);
  }
  if (!a.trace.empty()) {
    auto out = open_file(a.trace);
    write_trace_jsonl(out, cells, instance);
  }
  if (!a.plot.empty()) {
    const auto kind = parse_plot_kind(a.plot);
    if (a.plot_out.empty()) throw ConfigError("--plot needs --plot-out");
    auto out = open_file(a.plot_out);
    emit_plot_data(out, rows, kind);
  }
  return 0;
}

int do_gen(const GenArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  if (a.small) {
    SmallInstanceParams p;
    p.slots = a.slots;
    p.nodes = a.users;
    p.edges = a.edges;
    p.budget = a.budget;
    save_instance(a.out, random_small_instance(p, a.seed));
  } else {
    auto p = synthetic_params(a.users, a.billboards, a.edges, a.checkins, a.extent, a.hours,
                              a.delta, a.seed_cost_k, a.seed);
    p.lambda = a.lambda;
    p.budget = a.budget;
    p.prob_model = parse_probability_model(a.prob_model, a.pc, a.seed);
    save_instance(a.out, generate_synthetic(p));
  }
  return 0;
}

int do_diagnose(const DiagnoseArgs& a) {
  const auto instance = load_instance(a.instance);
  const CombinedModel model(instance, EvalMode::exact());
  const PhiTable table(model);
  const auto report = make_structure_report(table, a.max_elems);
  if (a.budget < 0.0) {
    std::cout << to_json(report, instance) << '\n';
    return 0;
  }
  // With a budget, append the exhaustive optimum.
  auto j = nlohmann::json::parse(to_json(report, instance));
  const auto opt = brute_force_optimum(table, a.budget);
  j["phi_opt"] = opt.phi_opt;
  std::vector<std::int64_t> slot_ids, user_ids;
  for (auto s : opt.best_slots) slot_ids.push_back(instance.slots().slots[s].id.value);
  for (auto v : opt.best_seeds) user_ids.push_back(instance.graph().user(v).value);
  j["best_slots"] = slot_ids;
  j["best_seeds"] = user_ids;
  std::cout << j.dump(2) << '\n';
  return 0;
}

// Each subcommand is parsed by its own app so that a config file given to
// `run` sees top-level keys.
int parse_and_dispatch(CLI::App& app, int argc, char** argv, const std::function<int()>& body) {
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

constexpr const char* kUsage =
    "Joint billboard and social seed selection under one budget\n"
    "Usage: splitmax SUBCOMMAND [OPTIONS]\n\n"
    "Subcommands:\n"
    "  run        Run algorithms over a budget sweep\n"
    "  gen        Write a synthetic instance directory\n"
    "  diagnose   Measure gamma, alpha and the bound\n";

}  // namespace

int main(int argc, char** argv) {
  const std::string cmd = argc > 1 ? argv[1] : "";
  if (cmd == "-h" || cmd == "--help") {
    std::cout << kUsage;
    return 0;
  }
  // the subcommand name stands in for the program name
  const int sub_argc = argc - 1;
  char** sub_argv = argv + 1;

  if (cmd == "run") {
    RunArgs run;
    CLI::App app{"Run algorithms over a budget sweep", "splitmax run"};
    app.set_config("--config", "", "TOML experiment file");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.add_option("--instance", run.instance, "Instance directory");
    add_synthetic_options(&app, run.users, run.billboards, run.edges, run.checkins, run.extent,
                          run.hours, run.delta, run.seed_cost_k);
    app.add_option("--algo,--algorithms", run.algorithms,
                   "rg, tpg, random, topk, hdh, pagerank");
    app.add_option("--budget,--budgets", run.budgets, "Budgets");
    app.add_option("--prob-model,--prob_model", run.prob_model,
                   "uniform, wc, wc-out, trivalency, explicit");
    app.add_option("--pc", run.pc, "Uniform edge probability");
    app.add_option("--epsilon", run.epsilon, "Sampling parameter");
    app.add_option("--lambda", run.lambda, "Influence radius in meters");
    app.add_option("-R,--simulations", run.simulations, "Monte Carlo simulations");
    app.add_option("--seed,--rng_seed", run.seed, "Random seed");
    app.add_flag("--exact", run.exact, "Exact evaluation for small instances");
    app.add_flag("--full-sampling,--full_sampling", run.full_sampling,
                 "Sample every candidate each round");
    app.add_option("--merge", run.merge, "Baseline channel merge: rank or alternate");
    app.add_option("--out", run.out, "Results CSV (stdout when omitted)");
    app.add_option("--trace", run.trace, "Selection trace as JSON lines");
    app.add_option("--plot", run.plot, "influence_vs_budget, split_vs_algo or time_vs_budget");
    app.add_option("--plot-out,--plot_out", run.plot_out, "Plot data CSV");
    return parse_and_dispatch(app, sub_argc, sub_argv, [&] { return do_run(run); });
  }

  if (cmd == "gen") {
    GenArgs gen;
    CLI::App app{"Write a synthetic instance directory", "splitmax gen"};
    add_synthetic_options(&app, gen.users, gen.billboards, gen.edges, gen.checkins, gen.extent,
                          gen.hours, gen.delta, gen.seed_cost_k);
    app.add_option("--lambda", gen.lambda, "Influence radius in meters");
    app.add_option("--prob-model", gen.prob_model, "uniform, wc, wc-out, trivalency");
    app.add_option("--pc", gen.pc, "Uniform edge probability");
    app.add_option("--budget", gen.budget, "Budget stored with the instance");
    app.add_option("--seed", gen.seed, "Random seed");
    app.add_flag("--small", gen.small, "Small abstract instance for brute force");
    app.add_option("--slots", gen.slots, "Slot count for --small");
    app.add_option("--out", gen.out, "Output directory")->required();
    return parse_and_dispatch(app, sub_argc, sub_argv, [&] {
      // The synthetic defaults are far past what brute force can handle.
      if (gen.small) {
        const SmallInstanceParams d;
        if (app.count("--users") == 0) gen.users = d.nodes;
        if (app.count("--edges") == 0) gen.edges = d.edges;
      }
      return do_gen(gen);
    });
  }

  if (cmd == "diagnose") {
    DiagnoseArgs diag;
    CLI::App app{"Measure gamma, alpha and the bound", "splitmax diagnose"};
    app.add_option("--instance", diag.instance, "Instance directory")->required();
    app.add_option("--max-elems", diag.max_elems, "Enumeration cap per channel");
    app.add_option("--budget", diag.budget, "Also report the exhaustive optimum");
    return parse_and_dispatch(app, sub_argc, sub_argv, [&] { return do_diagnose(diag); });
  }

  std::cerr << (cmd.empty() ? std::string("a subcommand is required\n")
                            : "unknown subcommand '" + cmd + "'\n")
            << kUsage;
  return kExitConfig;
}

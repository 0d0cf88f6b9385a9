#include "splitmax/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace splitmax {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ProblemInstance rebuild(const ProblemInstance& inst, SocialGraph graph, InstanceParams params) {
  if (!inst.billboards().empty() || !inst.trajectories().records.empty()) {
    return ProblemInstance(inst.trajectories(),
                           {inst.billboards().begin(), inst.billboards().end()},
                           inst.slots(), std::move(graph), params);
  }
  return ProblemInstance(inst.slots(), inst.matrix(), inst.universe(), std::move(graph),
                         params);
}

}  // namespace

void validate(const ExperimentConfig& config) {
  if (config.budgets.empty()) throw ConfigError("at least one budget is required");
  for (Money b : config.budgets) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("budgets must be >= 0");
  }
  if (config.algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) {
    throw ConfigError("epsilon must be in (0, 1)");
  }
  if (config.simulations == 0) throw ConfigError("simulations must be >= 1");
  if (config.lambda && !(*config.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  if (config.prob_model) parse_probability_model(*config.prob_model, config.pc, 0);
}

ProblemInstance materialize_instance(const ExperimentConfig& config) {
  if (!config.instance_dir) {
    SyntheticParams p = config.synthetic;
    if (config.lambda) p.lambda = *config.lambda;
    if (config.prob_model) {
      p.prob_model = parse_probability_model(*config.prob_model, config.pc, p.rng_seed);
    }
    return generate_synthetic(p);
  }
  ProblemInstance inst = load_instance(*config.instance_dir);
  const bool new_lambda = config.lambda && *config.lambda != inst.params().lambda;
  if (!new_lambda && !config.prob_model) return inst;
  InstanceParams params = inst.params();
  if (config.lambda) params.lambda = *config.lambda;
  SocialGraph graph = inst.graph();
  if (config.prob_model) {
    graph = assign_probabilities(
        graph, parse_probability_model(*config.prob_model, config.pc, params.rng_seed));
  }
  return rebuild(inst, std::move(graph), params);
}

std::uint64_t cell_seed(std::uint64_t rng_seed, Algorithm algo, Money budget) {
  return splitmix64(splitmix64(rng_seed) ^ splitmix64(fnv1a(algorithm_name(algo))) ^
                    fnv1a(fmt(budget)));
}

std::vector<CellResult> run_cells(const ExperimentConfig& config,
                                  const ProblemInstance& instance) {
  validate(config);
  const EvalMode mode = config.exact
                            ? EvalMode::exact()
                            : EvalMode::monte_carlo(config.simulations, config.rng_seed);
  const CombinedModel model(instance, mode);
  auto budgets = config.budgets;
  std::sort(budgets.begin(), budgets.end());

  std::vector<CellResult> cells;
  for (Algorithm algo : config.algorithms) {
    for (Money budget : budgets) {
      RunOptions opts;
      opts.epsilon = config.epsilon;
      opts.full_sampling = config.full_sampling;
      opts.rng_seed = cell_seed(config.rng_seed, algo, budget);
      opts.merge = config.merge;
      opts.pagerank = config.pagerank;

      const auto t0 = std::chrono::steady_clock::now();
      auto result = run_algorithm(algo, model, budget, opts);
      const auto t1 = std::chrono::steady_clock::now();

      const auto& sol = result.solution;
      ResultRow row;
      row.algorithm = algorithm_name(algo);
      row.budget = budget;
      row.phi_total = sol.phi.phi;
      row.phi_billboard = sol.phi.billboard;
      row.phi_social = sol.phi.social;
      row.phi_interaction = sol.phi.interaction;
      if (sol.spent() > 0.0) {
        row.split_pct_billboard = sol.spent_billboard / sol.spent();
        row.split_pct_social = sol.spent_social / sol.spent();
      }
      row.wall_time_ms = std::max(
          1e-3, std::chrono::duration<double, std::milli>(t1 - t0).count());
      row.rng_seed = config.rng_seed;
      cells.push_back({std::move(row), std::move(result)});
    }
  }
  return cells;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto instance = materialize_instance(config);
  std::vector<ResultRow> rows;
  for (auto& cell : run_cells(config, instance)) rows.push_back(std::move(cell.row));
  return rows;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << kResultHeader << '\n';
  for (const auto& r : rows) {
    out << r.algorithm << ',' << fmt(r.budget) << ',' << fmt(r.phi_total) << ','
        << fmt(r.phi_billboard) << ',' << fmt(r.phi_social) << ','
        << fmt(r.phi_interaction) << ',' << fmt(r.split_pct_billboard) << ','
        << fmt(r.split_pct_social) << ',' << fmt(r.wall_time_ms) << ',' << r.rng_seed
        << '\n';
  }
}

std::vector<ResultRow> read_results_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line) || line != kResultHeader) {
    throw DataError("results:1: unexpected header");
  }
  auto real = [&](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
      throw DataError("results:" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
    return v;
  };
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10) {
      throw DataError("results:" + std::to_string(line_no) + ": expected 10 fields");
    }
    ResultRow r;
    r.algorithm = f[0];
    r.budget = real(f[1]);
    r.phi_total = real(f[2]);
    r.phi_billboard = real(f[3]);
    r.phi_social = real(f[4]);
    r.phi_interaction = real(f[5]);
    r.split_pct_billboard = real(f[6]);
    r.split_pct_social = real(f[7]);
    r.wall_time_ms = real(f[8]);
    const auto [p, ec] = std::from_chars(f[9].data(), f[9].data() + f[9].size(), r.rng_seed);
    if (ec != std::errc() || p != f[9].data() + f[9].size()) {
      throw DataError("results:" + std::to_string(line_no) + ": bad rng_seed");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

PlotKind parse_plot_kind(const std::string& name) {
  for (auto k : {PlotKind::kInfluenceVsBudget, PlotKind::kSplitVsAlgo, PlotKind::kTimeVsBudget}) {
    if (plot_kind_name(k) == name) return k;
  }
  throw ConfigError("unknown plot kind '" + name + "'");
}

std::string plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::kInfluenceVsBudget: return "influence_vs_budget";
    case PlotKind::kSplitVsAlgo: return "split_vs_algo";
    case PlotKind::kTimeVsBudget: return "time_vs_budget";
  }
  return "?";
}

void emit_plot_data(std::ostream& out, const std::vector<ResultRow>& rows, PlotKind kind) {
  if (rows.empty()) throw ConfigError("no result rows to plot");
  switch (kind) {
    case PlotKind::kInfluenceVsBudget:
      out << "algorithm,budget,phi_total,phi_billboard,phi_social,phi_interaction\n";
      for (const auto& r : rows) {
        out << r.algorithm << ',' << fmt(r.budget) << ',' << fmt(r.phi_total) << ','
            << fmt(r.phi_billboard) << ',' << fmt(r.phi_social) << ','
            << fmt(r.phi_interaction) << '\n';
      }
      break;
    case PlotKind::kSplitVsAlgo:
      out << "algorithm,budget,billboard_pct,social_pct\n";
      for (const auto& r : rows) {
        out << r.algorithm << ',' << fmt(r.budget) << ',' << fmt(100.0 * r.split_pct_billboard)
            << ',' << fmt(100.0 * r.split_pct_social) << '\n';
      }
      break;
    case PlotKind::kTimeVsBudget:
      out << "algorithm,budget,wall_time_ms\n";
      for (const auto& r : rows) {
        out << r.algorithm << ',' << fmt(r.budget) << ',' << fmt(r.wall_time_ms) << '\n';
      }
      break;
  }
}

void write_trace_jsonl(std::ostream& out, const std::vector<CellResult>& cells,
                       const ProblemInstance& instance) {
  for (const auto& cell : cells) {
    for (const auto& step : cell.result.trace.steps) {
      nlohmann::json j;
      j["algorithm"] = cell.row.algorithm;
      j["budget"] = cell.row.budget;
      j["iteration"] = step.iteration;
      j["kind"] = step.candidate.is_slot() ? "slot" : "seed";
      j["id"] = step.candidate.is_slot()
                    ? instance.slots().slots[step.candidate.index].id.value
                    : instance.graph().user(step.candidate.index).value;
      j["gain"] = step.gain;
      j["remaining"] = step.remaining;
      out << j.dump() << '\n';
    }
  }
}

}  // namespace splitmax

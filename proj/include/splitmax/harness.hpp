#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splitmax/dataset.hpp"
#include "splitmax/optimizers.hpp"

namespace splitmax {

struct ExperimentConfig {
  // Instance directory; a synthetic instance is generated when absent.
  std::optional<std::filesystem::path> instance_dir;
  SyntheticParams synthetic;

  std::vector<Money> budgets;
  std::vector<Algorithm> algorithms;
  // Overrides the instance's edge probabilities when set.
  std::optional<std::string> prob_model;
  double pc = 0.1;
  double epsilon = 0.01;
  std::optional<double> lambda;  // default 100 m for synthetic instances
  std::size_t simulations = 1000;
  std::uint64_t rng_seed = 42;
  bool exact = false;
  bool full_sampling = false;
  MergeRule merge = MergeRule::kRank;
  PageRankOptions pagerank;
};

struct ResultRow {
  std::string algorithm;
  Money budget = 0.0;
  double phi_total = 0.0;
  double phi_billboard = 0.0;
  double phi_social = 0.0;
  double phi_interaction = 0.0;
  double split_pct_billboard = 0.0;  // fraction of spent money, in [0, 1]
  double split_pct_social = 0.0;
  double wall_time_ms = 0.0;
  std::uint64_t rng_seed = 0;

  friend bool operator==(const ResultRow&, const ResultRow&) = default;
};

struct CellResult {
  ResultRow row;
  OptimizerResult result;
};

// Throws ConfigError for an invalid config and DataError for an
// unloadable instance.
void validate(const ExperimentConfig& config);
ProblemInstance materialize_instance(const ExperimentConfig& config);

// Random stream of one (algorithm, budget) cell.
std::uint64_t cell_seed(std::uint64_t rng_seed, Algorithm algo, Money budget);

// One cell per (algorithm, budget), ordered by the config's algorithm order
// and then by budget.
std::vector<CellResult> run_cells(const ExperimentConfig& config,
                                  const ProblemInstance& instance);
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

inline constexpr const char* kResultHeader =
    "algorithm,budget,phi_total,phi_billboard,phi_social,phi_interaction,"
    "split_pct_billboard,split_pct_social,wall_time_ms,rng_seed";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

enum class PlotKind { kInfluenceVsBudget, kSplitVsAlgo, kTimeVsBudget };
PlotKind parse_plot_kind(const std::string& name);
std::string plot_kind_name(PlotKind kind);

// One data line per result row. Throws ConfigError on empty input.
void emit_plot_data(std::ostream& out, const std::vector<ResultRow>& rows, PlotKind kind);

// JSON lines, one object per committed selection.
void write_trace_jsonl(std::ostream& out, const std::vector<CellResult>& cells,
                       const ProblemInstance& instance);

}  // namespace splitmax

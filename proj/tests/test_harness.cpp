#include <sstream>

#include "doctest.h"
#include "splitmax/harness.hpp"

using namespace splitmax;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.synthetic.users = 30;
  cfg.synthetic.billboards = 3;
  cfg.synthetic.edges = 40;
  cfg.synthetic.rng_seed = 3;
  cfg.simulations = 200;
  cfg.rng_seed = 3;
  return cfg;
}

std::vector<ResultRow> without_time(std::vector<ResultRow> rows) {
  for (auto& r : rows) r.wall_time_ms = 0.0;
  return rows;
}

}  // namespace

TEST_CASE("config validation") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::kTpg};
  CHECK_THROWS_AS(validate(cfg), ConfigError);  // no budgets
  cfg.budgets = {100};
  CHECK_NOTHROW(validate(cfg));
  cfg.epsilon = 1.5;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.epsilon = 0.1;
  cfg.budgets = {-5};
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.budgets = {5};
  cfg.prob_model = "bogus";
  CHECK_THROWS_AS(validate(cfg), ConfigError);
  cfg.prob_model.reset();
  cfg.instance_dir = "/nonexistent/splitmax";
  CHECK_THROWS_AS(materialize_instance(cfg), DataError);
}

TEST_CASE("zero budget row") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::kRandomizedGreedy, Algorithm::kHdh};
  cfg.budgets = {0};
  auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 2);
  for (const auto& r : rows) {
    CHECK(r.phi_total == 0.0);
    CHECK(r.phi_billboard == 0.0);
    CHECK(r.phi_social == 0.0);
    CHECK(r.phi_interaction == 0.0);
    CHECK(r.split_pct_billboard == 0.0);
    CHECK(r.wall_time_ms > 0.0);
  }
}

TEST_CASE("sweep rows and determinism") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::kTpg};
  cfg.budgets = {2000, 500};
  auto rows = run_experiment(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].budget == 500);
  CHECK(rows[1].budget == 2000);
  CHECK(rows[0].rng_seed == 3);
  for (const auto& r : rows) {
    if (r.split_pct_billboard + r.split_pct_social > 0.0) {
      CHECK(r.split_pct_billboard + r.split_pct_social == doctest::Approx(1.0));
    }
  }
  CHECK(without_time(rows) == without_time(run_experiment(cfg)));

  CHECK(cell_seed(1, Algorithm::kTpg, 500) != cell_seed(1, Algorithm::kTpg, 1000));
  CHECK(cell_seed(1, Algorithm::kTpg, 500) != cell_seed(1, Algorithm::kRandom, 500));
  CHECK(cell_seed(1, Algorithm::kTpg, 500) == cell_seed(1, Algorithm::kTpg, 500));
}

TEST_CASE("results csv round trip") {
  std::vector<ResultRow> rows(2);
  rows[0] = {"tpg", 500, 12.25, 3.5, 7.0, 1.75, 0.2, 0.8, 1.234, 42};
  rows[1] = {"rg", 1000, 1.0 / 3.0, 0.1, 0.2, 1e-17, 0.0, 1.0, 0.001, 18446744073709551615ULL};
  std::stringstream ss;
  write_results_csv(ss, rows);
  CHECK(ss.str().rfind(std::string(kResultHeader) + "\n", 0) == 0);
  CHECK(read_results_csv(ss) == rows);

  std::stringstream bad("algorithm,budget\n");
  CHECK_THROWS_AS(read_results_csv(bad), DataError);
  std::stringstream short_row(std::string(kResultHeader) + "\ntpg,1,2\n");
  CHECK_THROWS_AS(read_results_csv(short_row), DataError);
}

TEST_CASE("plot data") {
  ResultRow r{"tpg", 500, 10, 4, 5, 1, 0.25, 0.75, 2.5, 1};
  std::ostringstream one;
  emit_plot_data(one, {r}, PlotKind::kInfluenceVsBudget);
  CHECK(one.str() ==
        "algorithm,budget,phi_total,phi_billboard,phi_social,phi_interaction\n"
        "tpg,500,10,4,5,1\n");

  std::ostringstream split;
  emit_plot_data(split, {r}, PlotKind::kSplitVsAlgo);
  CHECK(split.str() == "algorithm,budget,billboard_pct,social_pct\ntpg,500,25,75\n");

  std::ostringstream time;
  emit_plot_data(time, {r}, PlotKind::kTimeVsBudget);
  CHECK(time.str() == "algorithm,budget,wall_time_ms\ntpg,500,2.5\n");

  std::ostringstream none;
  CHECK_THROWS_AS(emit_plot_data(none, {}, PlotKind::kTimeVsBudget), ConfigError);
  CHECK(parse_plot_kind("split_vs_algo") == PlotKind::kSplitVsAlgo);
  CHECK_THROWS_AS(parse_plot_kind("pie"), ConfigError);
}

TEST_CASE("split shares sum to 100 on a sweep") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::kTpg, Algorithm::kTopK, Algorithm::kRandom};
  cfg.budgets = {500, 1500};
  auto rows = run_experiment(cfg);
  std::ostringstream out;
  emit_plot_data(out, rows, PlotKind::kSplitVsAlgo);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto a = line.find(',', line.find(',') + 1);
    const auto b = line.find(',', a + 1);
    const double bill = std::stod(line.substr(a + 1, b - a - 1));
    const double soc = std::stod(line.substr(b + 1));
    if (bill + soc > 0.0) CHECK(bill + soc == doctest::Approx(100.0));
  }
  CHECK(n == rows.size());
}

TEST_CASE("golden influence plot on the pinned fixture") {
  ExperimentConfig cfg;
  cfg.synthetic.users = 40;
  cfg.synthetic.billboards = 3;
  cfg.synthetic.edges = 12;
  cfg.synthetic.horizon = {0, 3 * 3600};
  cfg.synthetic.rng_seed = 11;
  cfg.synthetic.seed_cost_k = 10;
  cfg.rng_seed = 11;
  cfg.exact = true;
  cfg.full_sampling = true;
  cfg.algorithms = {Algorithm::kRandomizedGreedy, Algorithm::kTpg, Algorithm::kTopK,
                    Algorithm::kRandom};
  cfg.budgets = {5, 15, 40};
  std::ostringstream out;
  emit_plot_data(out, run_experiment(cfg), PlotKind::kInfluenceVsBudget);
  CHECK(out.str() ==
        "algorithm,budget,phi_total,phi_billboard,phi_social,phi_interaction\n"
        "rg,5,19,19,0,0\n"
        "rg,15,39,19,10,10\n"
        "rg,40,67.25,21.25,30,16\n"
        "tpg,5,19,17,1,1\n"
        "tpg,15,39,19,10,10\n"
        "tpg,40,67.25,21.25,30,16\n"
        "topk,5,18,18,0,0\n"
        "topk,15,31.25,21.25,6,4\n"
        "topk,40,23,18,4,1\n"
        "random,5,12,9,3,0\n"
        "random,15,31,14,12,5\n"
        "random,40,67.25,21.25,30,16\n");
}

TEST_CASE("trace lines") {
  auto cfg = small_config();
  cfg.algorithms = {Algorithm::kTpg};
  cfg.budgets = {1500};
  const auto inst = materialize_instance(cfg);
  const auto cells = run_cells(cfg, inst);
  std::ostringstream out;
  write_trace_jsonl(out, cells, inst);
  std::size_t lines = 0;
  for (char c : out.str()) lines += c == '\n';
  CHECK(lines == cells[0].result.trace.steps.size());
}

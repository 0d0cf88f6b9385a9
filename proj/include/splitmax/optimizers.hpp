#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "splitmax/combined.hpp"

namespace splitmax {

struct TraceStep {
  std::size_t iteration = 0;
  Candidate candidate;
  double gain = 0.0;
  Money remaining = 0.0;
};

// Log of committed selections, in order.
struct GreedyTrace {
  std::vector<TraceStep> steps;
};

struct Solution {
  std::vector<SlotIndex> slots;
  std::vector<NodeId> seeds;
  Money budget = 0.0;
  Money spent_billboard = 0.0;
  Money spent_social = 0.0;
  ObjectiveValue phi;
  bool exact = false;

  Money spent() const { return spent_billboard + spent_social; }
};

struct OptimizerResult {
  Solution solution;
  GreedyTrace trace;
};

// Tolerance for comparing accumulated costs against a budget.
bool affordable(Money cost, Money remaining);

struct RandomizedGreedyOptions {
  double epsilon = 0.01;
  // Sample every remaining candidate each round (the epsilon -> 0 limit).
  bool full_sampling = false;
  std::uint64_t rng_seed = 0;
  // Monte Carlo only: gain-per-cost differences within this many standard
  // errors count as a tie, broken toward the cheaper candidate.
  double deadband_sigmas = 3.0;
};

OptimizerResult randomized_greedy(const CombinedModel& model, Money budget,
                                  const RandomizedGreedyOptions& options = {});

// Two-phase greedy: best slot and seed by singleton ratio first, then lazy
// greedy over a queue keyed by gain-per-cost upper bounds.
OptimizerResult tpg(const CombinedModel& model, Money budget);

OptimizerResult baseline_random(const CombinedModel& model, Money budget,
                                std::uint64_t rng_seed);

OptimizerResult baseline_top_k(const CombinedModel& model, Money budget);

// How slot and seed rankings are merged into one list by the baselines.
enum class MergeRule { kRank, kAlternate };

OptimizerResult baseline_hdh(const CombinedModel& model, Money budget,
                             MergeRule merge = MergeRule::kRank);

struct PageRankOptions {
  double damping = 0.85;
  std::size_t max_iterations = 100;
  double tolerance = 1e-8;  // L1 change between iterates
};

struct PageRankResult {
  std::vector<double> scores;
  std::size_t iterations = 0;
  bool converged = false;
};

// Power iteration; dangling nodes spread their mass uniformly.
PageRankResult pagerank(const SocialGraph& graph, const PageRankOptions& options = {});

OptimizerResult baseline_pagerank(const CombinedModel& model, Money budget,
                                  const PageRankOptions& options = {},
                                  MergeRule merge = MergeRule::kRank);

enum class Algorithm { kRandomizedGreedy, kTpg, kRandom, kTopK, kHdh, kPageRank };

std::string algorithm_name(Algorithm algo);
// "rg", "tpg", "random", "topk", "hdh", "pagerank"; throws ConfigError.
Algorithm parse_algorithm(const std::string& name);
MergeRule parse_merge_rule(const std::string& name);

struct RunOptions {
  double epsilon = 0.01;
  bool full_sampling = false;
  std::uint64_t rng_seed = 0;
  MergeRule merge = MergeRule::kRank;
  PageRankOptions pagerank;
};

OptimizerResult run_algorithm(Algorithm algo, const CombinedModel& model,
                              Money budget, const RunOptions& options);

}  // namespace splitmax

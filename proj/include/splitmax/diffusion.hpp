#pragma once

#include <cstdint>
#include <list>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "splitmax/types.hpp"

namespace splitmax {

// Edge probability models.
struct UniformProbability {
  double pc = 0.1;
};
// p(u,v) = 1 / in-degree(v); `use_out_degree` switches to 1 / out-degree(u).
struct WeightedCascade {
  bool use_out_degree = false;
};
// Each edge draws uniformly from {0.1, 0.01, 0.001}.
struct Trivalency {
  std::uint64_t seed = 0;
};
// Keep the probabilities already on the graph.
struct ExplicitProbability {};

using EdgeProbabilityModel = std::variant<UniformProbability, WeightedCascade,
                                          Trivalency, ExplicitProbability>;

std::string model_name(const EdgeProbabilityModel& model);

// Accepts "uniform", "wc", "wc-out", "trivalency", "explicit".
EdgeProbabilityModel parse_probability_model(const std::string& name, double pc,
                                             std::uint64_t seed);

SocialGraph assign_probabilities(const SocialGraph& graph,
                                 const EdgeProbabilityModel& model);

struct SpreadEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t simulations = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based random stream of one cascade simulation. The coin of edge e
// in simulation i depends only on (base seed, i, e), so two seed sets
// simulated with the same stream see the same live edges.
class SimulationStream {
 public:
  SimulationStream(std::uint64_t base_seed, std::uint64_t simulation);

  double uniform(std::size_t edge_index) const;
  bool live(std::size_t edge_index, double prob) const {
    return uniform(edge_index) < prob;
  }

 private:
  std::uint64_t key_;
};

// One Independent Cascade run. Breadth-first from the seeds; each newly
// active node tries its out-edges in ascending target order exactly once.
// Returns the activated nodes in ascending order.
std::vector<NodeId> simulate_once(const SocialGraph& graph,
                                  std::span<const NodeId> seeds,
                                  const SimulationStream& stream);

// Mean active-set size over `simulations` runs using streams
// (rng_seed, 0..simulations-1). The empty seed set returns 0 without
// simulating.
SpreadEstimate estimate_spread(const SocialGraph& graph,
                               std::span<const NodeId> seeds,
                               std::size_t simulations, std::uint64_t rng_seed);

inline constexpr std::size_t kMaxExactEdges = 20;

// Expected spread by enumerating every live-edge world of the whole graph.
// Throws ConfigError for graphs with more than kMaxExactEdges edges.
double exact_spread(const SocialGraph& graph, std::span<const NodeId> seeds);

// node -> probability, sorted by node; the seed itself maps to 1.
using ActivationMap = std::vector<std::pair<NodeId, double>>;

ActivationMap activation_probability(const SocialGraph& graph, NodeId seed,
                                     std::size_t simulations,
                                     std::uint64_t rng_seed);

ActivationMap exact_activation_probability(const SocialGraph& graph,
                                           NodeId seed);

// LRU cache of Monte Carlo activation maps for one graph, keyed by
// (seed, simulations, rng_seed).
class ActivationCache {
 public:
  ActivationCache(const SocialGraph& graph, std::size_t capacity);

  std::shared_ptr<const ActivationMap> get(NodeId seed, std::size_t simulations,
                                           std::uint64_t rng_seed);
  std::size_t size() const;
  std::size_t misses() const;

 private:
  struct Key {
    NodeId seed;
    std::size_t simulations;
    std::uint64_t rng_seed;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  using Entry = std::pair<Key, std::shared_ptr<const ActivationMap>>;

  const SocialGraph* graph_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::list<Entry> order_;
  std::unordered_map<Key, std::list<Entry>::iterator, KeyHash> index_;
  std::size_t misses_ = 0;
};

// Incremental spread for a growing seed set.
class SpreadCursor {
 public:
  virtual ~SpreadCursor() = default;
  // Spread increase from adding `seed`; std_error of the paired difference.
  virtual SpreadEstimate gain(NodeId seed) const = 0;
  virtual void add(NodeId seed) = 0;
  virtual SpreadEstimate value() const = 0;
  virtual std::unique_ptr<SpreadCursor> clone() const = 0;
};

// Spread oracle used by the combined objective: either Monte Carlo with
// common random numbers, or exact live-edge enumeration per weakly
// connected component.
class SpreadEngine {
 public:
  virtual ~SpreadEngine() = default;
  virtual SpreadEstimate spread(std::span<const NodeId> seeds) const = 0;
  virtual std::shared_ptr<const ActivationMap> activation(NodeId seed) const = 0;
  virtual std::unique_ptr<SpreadCursor> cursor() const = 0;
  virtual bool exact() const = 0;
};

std::unique_ptr<SpreadEngine> make_monte_carlo_engine(
    const SocialGraph& graph, std::size_t simulations, std::uint64_t rng_seed,
    std::size_t cache_capacity = 4096);

// Throws ConfigError when the graph has more than kMaxExactEdges edges.
std::unique_ptr<SpreadEngine> make_exact_engine(const SocialGraph& graph);

}  // namespace splitmax

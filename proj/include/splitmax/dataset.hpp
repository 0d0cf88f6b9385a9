#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "splitmax/diffusion.hpp"
#include "splitmax/instance.hpp"
#include "splitmax/types.hpp"

namespace splitmax {

struct TrajectoryFormat {
  CoordinateSystem coords = CoordinateSystem::kWgs84;
};

// CSV readers throw DataError naming the file and the 1-based line number
// of the offending row.
TrajectoryDB load_trajectories(const std::filesystem::path& path,
                               const TrajectoryFormat& format = {});
void save_trajectories(const std::filesystem::path& path, const TrajectoryDB& db);

std::vector<Billboard> load_billboards(const std::filesystem::path& path);
void save_billboards(const std::filesystem::path& path,
                     std::span<const Billboard> billboards);

// graph.csv: `src,dst[,prob]`. Nodes come from users.csv when given
// (`user_id,seed_cost`), otherwise from the edge endpoints with zero costs.
struct GraphFiles {
  std::filesystem::path edges;
  std::filesystem::path users;  // optional
};
struct LoadedGraph {
  SocialGraph graph;
  bool has_probabilities = false;
  bool has_seed_costs = false;
};
LoadedGraph load_graph(const GraphFiles& files);
void save_graph(const GraphFiles& files, const SocialGraph& graph);

SlotSet load_slots(const std::filesystem::path& path);
void save_slots(const std::filesystem::path& path, const SlotSet& slots);

// Tiles [horizon.start, horizon.end) with consecutive slots of length
// delta for every billboard; a trailing partial slot is dropped. Slot ids
// are assigned billboard-major starting at 1.
SlotSet derive_slots(std::span<const Billboard> billboards, Timestamp delta,
                     const Interval& horizon);

// floor(delta_scale * influence / 10), at least 1.
Money slot_cost(double influence, double delta_scale);

// k * (|V| / sum of out-degrees) * out-degree(node); 1 for out-degree 0.
Money seed_cost(const SocialGraph& graph, NodeId node, double k);
std::vector<Money> seed_costs(const SocialGraph& graph, double k);

// Slot costs from singleton influence with a per-slot scale drawn
// uniformly from [0.8, 1.1] using `rng_seed`.
std::vector<Money> price_slots(const SlotUserMatrix& matrix, std::uint64_t rng_seed);

struct SyntheticParams {
  std::size_t users = 100;
  std::size_t billboards = 4;
  std::size_t edges = 200;
  std::size_t checkins_per_user = 3;
  double extent = 2000.0;          // side of the square area, meters
  double hotspot_fraction = 0.6;   // check-ins placed near a billboard
  double lambda = 100.0;
  Interval horizon{0, 4 * 3600};
  Timestamp delta_slot = 3600;
  EdgeProbabilityModel prob_model = WeightedCascade{};
  double seed_cost_k = 1000.0;
  Money budget = 1000.0;
  std::uint64_t rng_seed = 42;
};

// Planar-coordinate instance: users 1..n, directed Erdos-Renyi graph with
// exactly `edges` distinct edges, check-ins clustered around billboards.
// A pure function of `params`.
ProblemInstance generate_synthetic(const SyntheticParams& params);

// Small abstract instance for oracles: the matrix is drawn directly instead
// of from trajectories. Users are exactly the graph nodes 1..nodes; each
// slot gets a panel-size ratio from {1/4, 1/2, 3/4, 1} and covers each user
// with probability `coverage`. Edge probabilities are uniform on (0, 1].
struct SmallInstanceParams {
  std::size_t slots = 4;
  std::size_t nodes = 4;
  std::size_t edges = 4;
  double coverage = 0.5;
  Money min_cost = 1.0;
  Money max_cost = 10.0;  // integer costs drawn from [min_cost, max_cost]
  Money budget = 10.0;
};
ProblemInstance random_small_instance(const SmallInstanceParams& params,
                                      std::uint64_t rng_seed);

// Instance directory: instance.json, trajectories.csv, billboards.csv,
// slots.csv, graph.csv, users.csv.
void save_instance(const std::filesystem::path& dir, const ProblemInstance& instance);

// Missing slots.csv: slots are derived and priced. Missing users.csv: seed
// costs follow the degree model with the stored k. A graph.csv without a
// prob column takes `prob_model` from instance.json.
ProblemInstance load_instance(const std::filesystem::path& dir);

// FNV-1a over the canonical CSV serialization of every component.
std::uint64_t summary_hash(const ProblemInstance& instance);

}  // namespace splitmax

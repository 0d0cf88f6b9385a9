#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splitmax {

// Thrown for invalid parameters and configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for unreadable or malformed input data (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class Tag>
struct StrongId {
  std::int64_t value = 0;

  friend auto operator<=>(const StrongId&, const StrongId&) = default;
};

using UserId = StrongId<struct UserTag>;
using BillboardId = StrongId<struct BillboardTag>;
using SlotId = StrongId<struct SlotTag>;

// Dense indices. NodeId indexes SocialGraph nodes, SlotIndex indexes
// SlotSet::slots, UserIndex indexes the instance's user universe.
using NodeId = std::uint32_t;
using SlotIndex = std::uint32_t;
using UserIndex = std::uint32_t;

using Money = double;
using Timestamp = std::int64_t;

enum class CoordinateSystem { kWgs84, kPlanar };

// In planar mode `lat` is the northing and `lon` the easting, both in meters.
struct Location {
  double lat = 0.0;
  double lon = 0.0;

  friend bool operator==(const Location&, const Location&) = default;
};

double distance_meters(const Location& a, const Location& b,
                       CoordinateSystem coords);

struct Interval {
  Timestamp start = 0;
  Timestamp end = 0;

  Timestamp length() const { return end - start; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct TrajectoryRecord {
  UserId user;
  Location location;
  Interval interval;  // closed [start, end]

  friend bool operator==(const TrajectoryRecord&,
                         const TrajectoryRecord&) = default;
};

struct TrajectoryDB {
  std::vector<TrajectoryRecord> records;
  Interval horizon;
  CoordinateSystem coords = CoordinateSystem::kPlanar;

  std::size_t size() const { return records.size(); }
  friend bool operator==(const TrajectoryDB&, const TrajectoryDB&) = default;
};

struct Billboard {
  BillboardId id;
  Location location;
  double panel_size = 1.0;

  friend bool operator==(const Billboard&, const Billboard&) = default;
};

// A rental window on one billboard. The interval is half-open [start, end)
// so that consecutive slots of the same billboard are disjoint.
struct BillboardSlot {
  SlotId id;
  BillboardId billboard;
  Interval interval;
  Money cost = 1.0;

  friend bool operator==(const BillboardSlot&, const BillboardSlot&) = default;
};

struct SlotSet {
  std::vector<BillboardSlot> slots;

  std::size_t size() const { return slots.size(); }
  friend bool operator==(const SlotSet&, const SlotSet&) = default;
};

struct EdgeRecord {
  UserId src;
  UserId dst;
  std::optional<double> prob;
};

struct Edge {
  NodeId src = 0;
  NodeId dst = 0;
  double prob = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed social graph in CSR layout. Nodes are kept sorted by UserId and
// out-edges of each node sorted by target, so an edge's position in edges()
// is a stable edge index.
class SocialGraph {
 public:
  SocialGraph() = default;

  // Edges without an explicit probability get 1.0 until a probability
  // model is assigned. Throws DataError on self-loops, duplicate edges,
  // unknown endpoints or probabilities outside (0,1].
  SocialGraph(std::vector<UserId> nodes, const std::vector<EdgeRecord>& edges,
              std::vector<Money> seed_costs = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return nodes_.empty(); }

  std::span<const UserId> nodes() const { return nodes_; }
  UserId user(NodeId node) const { return nodes_.at(node); }
  std::optional<NodeId> find(UserId user) const;
  NodeId index_of(UserId user) const;

  std::span<const Edge> edges() const { return edges_; }
  std::span<const Edge> out_edges(NodeId node) const {
    return {edges_.data() + offsets_[node], edges_.data() + offsets_[node + 1]};
  }
  std::size_t first_edge(NodeId node) const { return offsets_[node]; }
  std::uint32_t out_degree(NodeId node) const {
    return static_cast<std::uint32_t>(offsets_[node + 1] - offsets_[node]);
  }
  std::uint32_t in_degree(NodeId node) const { return in_degree_.at(node); }

  Money seed_cost(NodeId node) const { return seed_costs_.at(node); }
  std::span<const Money> seed_costs() const { return seed_costs_; }
  void set_seed_costs(std::vector<Money> costs);

  // Same topology with edge probabilities replaced (indexed like edges()).
  SocialGraph with_probabilities(std::span<const double> probs) const;

  friend bool operator==(const SocialGraph&, const SocialGraph&) = default;

 private:
  std::vector<UserId> nodes_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Edge> edges_;
  std::vector<std::uint32_t> in_degree_;
  std::vector<Money> seed_costs_;
};

// Sorted set of every user known to an instance: graph nodes plus
// trajectory users. Dense UserIndex values follow UserId order.
class UserUniverse {
 public:
  UserUniverse() = default;
  explicit UserUniverse(std::vector<UserId> ids);

  std::size_t size() const { return ids_.size(); }
  std::span<const UserId> ids() const { return ids_; }
  UserId id(UserIndex index) const { return ids_.at(index); }
  std::optional<UserIndex> find(UserId user) const;
  UserIndex index_of(UserId user) const;

 private:
  std::vector<UserId> ids_;
};

}  // namespace splitmax

template <class Tag>
struct std::hash<splitmax::StrongId<Tag>> {
  std::size_t operator()(const splitmax::StrongId<Tag>& id) const noexcept {
    return std::hash<std::int64_t>{}(id.value);
  }
};

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splitmax/billboard.hpp"
#include "splitmax/types.hpp"

namespace splitmax {

struct InstanceParams {
  Money budget = 0.0;
  double lambda = 100.0;  // influence radius in meters
  Timestamp delta_slot = 3600;
  std::uint64_t rng_seed = 0;
  double seed_cost_k = 1000.0;

  friend bool operator==(const InstanceParams&, const InstanceParams&) = default;
};

// Slots, social graph and trajectories over one shared user universe.
// Immutable once built, apart from pricing slots during construction.
class ProblemInstance {
 public:
  // Builds the universe (graph nodes plus trajectory users) and the
  // slot-user matrix from the raw data.
  ProblemInstance(TrajectoryDB trajectories, std::vector<Billboard> billboards,
                  SlotSet slots, SocialGraph graph, InstanceParams params);

  // Instance with a given matrix and no trajectory data. `universe` must
  // contain every graph node and be the matrix's user space.
  ProblemInstance(SlotSet slots, SlotUserMatrix matrix, UserUniverse universe,
                  SocialGraph graph, InstanceParams params);

  const TrajectoryDB& trajectories() const { return trajectories_; }
  std::span<const Billboard> billboards() const { return billboards_; }
  const SlotSet& slots() const { return slots_; }
  const SocialGraph& graph() const { return graph_; }
  const InstanceParams& params() const { return params_; }
  Money budget() const { return params_.budget; }
  const UserUniverse& universe() const { return universe_; }
  const SlotUserMatrix& matrix() const { return matrix_; }

  std::size_t slot_count() const { return slots_.size(); }
  std::size_t node_count() const { return graph_.node_count(); }

  Money slot_cost(SlotIndex slot) const { return slots_.slots[slot].cost; }
  Money seed_cost(NodeId node) const { return graph_.seed_cost(node); }
  UserIndex node_user(NodeId node) const { return node_user_[node]; }

  void set_slot_costs(std::span<const Money> costs);
  void set_budget(Money budget);

 private:
  void validate_and_index();

  TrajectoryDB trajectories_;
  std::vector<Billboard> billboards_;
  SlotSet slots_;
  SocialGraph graph_;
  InstanceParams params_;
  UserUniverse universe_;
  SlotUserMatrix matrix_;
  std::vector<UserIndex> node_user_;
};

}  // namespace splitmax

#include "splitmax/instance.hpp"

#include <cmath>
#include <string>
#include <unordered_set>

namespace splitmax {

namespace {

UserUniverse make_universe(const TrajectoryDB& db, const SocialGraph& graph) {
  std::vector<UserId> ids(graph.nodes().begin(), graph.nodes().end());
  for (const auto& r : db.records) ids.push_back(r.user);
  return UserUniverse(std::move(ids));
}

}  // namespace

ProblemInstance::ProblemInstance(TrajectoryDB trajectories,
                                 std::vector<Billboard> billboards, SlotSet slots,
                                 SocialGraph graph, InstanceParams params)
    : trajectories_(std::move(trajectories)),
      billboards_(std::move(billboards)),
      slots_(std::move(slots)),
      graph_(std::move(graph)),
      params_(params),
      universe_(make_universe(trajectories_, graph_)) {
  if (!(params_.lambda > 0.0)) throw ConfigError("lambda must be > 0");
  for (const auto& b : billboards_) {
    if (!(b.panel_size > 0.0)) {
      throw DataError("billboard " + std::to_string(b.id.value) +
                      ": panel size must be > 0");
    }
  }
  for (std::size_t i = 0; i < trajectories_.records.size(); ++i) {
    const auto& iv = trajectories_.records[i].interval;
    if (iv.start > iv.end) {
      throw DataError("trajectory record " + std::to_string(i + 1) +
                      ": t_start after t_end");
    }
    if (iv.start < trajectories_.horizon.start || iv.end > trajectories_.horizon.end) {
      throw DataError("trajectory record " + std::to_string(i + 1) +
                      ": interval outside the horizon");
    }
  }
  matrix_ = build_matrix(trajectories_, billboards_, slots_, params_.lambda, universe_);
  validate_and_index();
}

ProblemInstance::ProblemInstance(SlotSet slots, SlotUserMatrix matrix,
                                 UserUniverse universe, SocialGraph graph,
                                 InstanceParams params)
    : slots_(std::move(slots)),
      graph_(std::move(graph)),
      params_(params),
      universe_(std::move(universe)),
      matrix_(std::move(matrix)) {
  if (matrix_.slot_count() != slots_.size()) {
    throw std::invalid_argument("instance: matrix rows do not match slot count");
  }
  if (matrix_.user_count() != universe_.size()) {
    throw std::invalid_argument("instance: matrix columns do not match universe");
  }
  validate_and_index();
}

void ProblemInstance::validate_and_index() {
  if (!(params_.budget >= 0.0) || !std::isfinite(params_.budget)) {
    throw ConfigError("budget must be finite and >= 0");
  }
  std::unordered_set<SlotId> ids;
  for (const auto& s : slots_.slots) {
    if (!ids.insert(s.id).second) {
      throw DataError("duplicate slot id " + std::to_string(s.id.value));
    }
    if (!(s.cost >= 0.0) || !std::isfinite(s.cost)) {
      throw DataError("slot " + std::to_string(s.id.value) + ": negative cost");
    }
    if (s.interval.end <= s.interval.start) {
      throw DataError("slot " + std::to_string(s.id.value) + ": empty interval");
    }
  }
  node_user_.resize(graph_.node_count());
  for (NodeId v = 0; v < graph_.node_count(); ++v) {
    const auto u = universe_.find(graph_.user(v));
    if (!u) {
      throw DataError("graph user " + std::to_string(graph_.user(v).value) +
                      " missing from the user universe");
    }
    node_user_[v] = *u;
  }
}

void ProblemInstance::set_slot_costs(std::span<const Money> costs) {
  if (costs.size() != slots_.size()) {
    throw std::invalid_argument("set_slot_costs: size mismatch");
  }
  for (std::size_t i = 0; i < costs.size(); ++i) {
    if (!(costs[i] >= 0.0) || !std::isfinite(costs[i])) {
      throw DataError("slot costs must be finite and >= 0");
    }
    slots_.slots[i].cost = costs[i];
  }
}

void ProblemInstance::set_budget(Money budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ConfigError("budget must be finite and >= 0");
  }
  params_.budget = budget;
}

}  // namespace splitmax

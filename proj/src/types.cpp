#include "splitmax/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>
#include <string>

namespace splitmax {

namespace {

constexpr double kEarthRadiusMeters = 6371008.8;

std::string id_str(UserId id) { return std::to_string(id.value); }

}  // namespace

double distance_meters(const Location& a, const Location& b,
                       CoordinateSystem coords) {
  if (coords == CoordinateSystem::kPlanar) {
    return std::hypot(a.lat - b.lat, a.lon - b.lon);
  }
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) *
                       std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusMeters * std::asin(std::min(1.0, std::sqrt(s)));
}

SocialGraph::SocialGraph(std::vector<UserId> nodes,
                         const std::vector<EdgeRecord>& edges,
                         std::vector<Money> seed_costs)
{
  const std::size_t n = nodes.size();
  if (seed_costs.empty()) seed_costs.assign(n, 0.0);
  if (seed_costs.size() != n) {
    throw DataError("graph: seed cost count does not match node count");
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
  nodes_.reserve(n);
  std::vector<Money> sorted_costs;
  sorted_costs.reserve(n);
  for (std::size_t i : order) {
    nodes_.push_back(nodes[i]);
    sorted_costs.push_back(seed_costs[i]);
  }
  if (std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end()) {
    throw DataError("graph: duplicate node id");
  }

  std::vector<Edge> resolved;
  resolved.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.src == e.dst) {
      throw DataError("graph: self-loop on user " + id_str(e.src));
    }
    const double p = e.prob.value_or(1.0);
    if (!(p > 0.0 && p <= 1.0)) {
      throw DataError("graph: probability of edge " + id_str(e.src) + "->" +
                      id_str(e.dst) + " outside (0,1]");
    }
    resolved.push_back({index_of(e.src), index_of(e.dst), p});
  }
  std::sort(resolved.begin(), resolved.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  for (std::size_t i = 1; i < resolved.size(); ++i) {
    if (resolved[i].src == resolved[i - 1].src &&
        resolved[i].dst == resolved[i - 1].dst) {
      throw DataError("graph: duplicate edge " + id_str(nodes_[resolved[i].src]) +
                      "->" + id_str(nodes_[resolved[i].dst]));
    }
  }

  offsets_.assign(n + 1, 0);
  in_degree_.assign(n, 0);
  for (const auto& e : resolved) {
    ++offsets_[e.src + 1];
    ++in_degree_[e.dst];
  }
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
  edges_ = std::move(resolved);

  set_seed_costs(std::move(sorted_costs));
}

std::optional<NodeId> SocialGraph::find(UserId user) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), user);
  if (it == nodes_.end() || *it != user) return std::nullopt;
  return static_cast<NodeId>(it - nodes_.begin());
}

NodeId SocialGraph::index_of(UserId user) const {
  if (auto found = find(user)) return *found;
  throw DataError("graph: unknown user " + id_str(user));
}

void SocialGraph::set_seed_costs(std::vector<Money> costs) {
  if (costs.size() != nodes_.size()) {
    throw DataError("graph: seed cost count does not match node count");
  }
  for (Money c : costs) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw DataError("graph: seed costs must be finite and non-negative");
    }
  }
  seed_costs_ = std::move(costs);
}

SocialGraph SocialGraph::with_probabilities(std::span<const double> probs) const {
  if (probs.size() != edges_.size()) {
    throw std::invalid_argument("with_probabilities: size mismatch");
  }
  SocialGraph copy = *this;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0 && probs[i] <= 1.0)) {
      throw DataError("graph: edge probability outside (0,1]");
    }
    copy.edges_[i].prob = probs[i];
  }
  return copy;
}

UserUniverse::UserUniverse(std::vector<UserId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

std::optional<UserIndex> UserUniverse::find(UserId user) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), user);
  if (it == ids_.end() || *it != user) return std::nullopt;
  return static_cast<UserIndex>(it - ids_.begin());
}

UserIndex UserUniverse::index_of(UserId user) const {
  if (auto found = find(user)) return *found;
  throw DataError("unknown user " + id_str(user));
}

}  // namespace splitmax

#pragma once

// Hand-built instances and brute-force oracles shared by the tests. The
// oracles avoid the library's evaluation code paths on purpose.

#include <cmath>
#include <cstdint>
#include <tuple>
#include <vector>

#include "splitmax/combined.hpp"
#include "splitmax/dataset.hpp"
#include "splitmax/instance.hpp"

namespace fixtures {

using namespace splitmax;

struct HandEdge {
  std::int64_t src;
  std::int64_t dst;
  double p;
};

struct HandSpec {
  std::size_t users = 0;  // universe 1..users
  std::size_t nodes = 0;  // graph nodes 1..nodes, nodes <= users
  std::vector<HandEdge> edges;
  std::vector<Money> seed_costs;  // empty -> all 1
  // One row per slot: (user id, prob).
  std::vector<std::vector<std::pair<std::int64_t, double>>> rows;
  std::vector<Money> slot_costs;  // empty -> all 1
  Money budget = 0.0;
};

inline ProblemInstance build(const HandSpec& h) {
  std::vector<UserId> users, nodes;
  for (std::size_t i = 1; i <= h.users; ++i) users.push_back(UserId{std::int64_t(i)});
  for (std::size_t i = 1; i <= h.nodes; ++i) nodes.push_back(UserId{std::int64_t(i)});
  std::vector<EdgeRecord> edges;
  for (const auto& e : h.edges) edges.push_back({UserId{e.src}, UserId{e.dst}, e.p});
  auto costs = h.seed_costs;
  if (costs.empty()) costs.assign(h.nodes, 1.0);
  SocialGraph graph(nodes, edges, costs);

  SlotSet slots;
  std::vector<std::vector<SlotEntry>> rows;
  for (std::size_t s = 0; s < h.rows.size(); ++s) {
    const auto id = static_cast<std::int64_t>(s + 1);
    const Money c = h.slot_costs.empty() ? 1.0 : h.slot_costs[s];
    slots.slots.push_back({SlotId{id}, BillboardId{id}, {0, 1}, c});
    std::vector<SlotEntry> row;
    for (auto [u, p] : h.rows[s]) row.push_back({static_cast<UserIndex>(u - 1), p});
    rows.push_back(row);
  }
  InstanceParams ip;
  ip.budget = h.budget;
  return ProblemInstance(std::move(slots), SlotUserMatrix(std::move(rows), h.users),
                         UserUniverse(users), std::move(graph), ip);
}

// Dense copy of the matrix, [slot][user].
inline std::vector<std::vector<double>> dense(const SlotUserMatrix& m) {
  std::vector<std::vector<double>> d(m.slot_count(), std::vector<double>(m.user_count()));
  for (SlotIndex s = 0; s < m.slot_count(); ++s) {
    for (const auto& e : m.row(s)) d[s][e.user] = e.prob;
  }
  return d;
}

// Per-user product recomputation of the billboard term.
inline std::vector<double> naive_coverage(const SlotUserMatrix& m,
                                          const std::vector<SlotIndex>& slots) {
  const auto d = dense(m);
  std::vector<double> cov(m.user_count());
  for (std::size_t u = 0; u < m.user_count(); ++u) {
    double surv = 1.0;
    for (auto s : slots) surv *= 1.0 - d[s][u];
    cov[u] = 1.0 - surv;
  }
  return cov;
}

inline double naive_influence(const SlotUserMatrix& m, const std::vector<SlotIndex>& slots) {
  double total = 0.0;
  for (double c : naive_coverage(m, slots)) total += c;
  return total;
}

// Reachability probability of every node from `seeds`, by enumerating all
// 2^m live-edge worlds with a plain DFS.
inline std::vector<double> naive_reach(const SocialGraph& g, const std::vector<NodeId>& seeds) {
  const std::size_t n = g.node_count();
  const auto edges = g.edges();
  const std::size_t m = edges.size();
  std::vector<double> reach(n, 0.0);
  for (std::uint64_t world = 0; world < (std::uint64_t{1} << m); ++world) {
    double w = 1.0;
    for (std::size_t e = 0; e < m; ++e) {
      w *= (world >> e & 1) ? edges[e].prob : 1.0 - edges[e].prob;
    }
    if (w == 0.0) continue;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack(seeds.begin(), seeds.end());
    for (auto s : seeds) seen[s] = 1;
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (std::size_t e = 0; e < m; ++e) {
        if (edges[e].src == u && (world >> e & 1) && !seen[edges[e].dst]) {
          seen[edges[e].dst] = 1;
          stack.push_back(edges[e].dst);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) {
      if (seen[v]) reach[v] += w;
    }
  }
  return reach;
}

inline double naive_spread(const SocialGraph& g, const std::vector<NodeId>& seeds) {
  if (seeds.empty()) return 0.0;
  double s = 0.0;
  for (double r : naive_reach(g, seeds)) s += r;
  return s;
}

struct NaivePhi {
  double billboard = 0.0;
  double social = 0.0;
  double interaction = 0.0;
  double total() const { return billboard + social + interaction; }
};

// Sum over users of the noisy-or of single-seed reach probabilities.
inline double naive_social_mass(const ProblemInstance& inst, const std::vector<NodeId>& seeds) {
  std::vector<double> surv(inst.universe().size(), 1.0);
  for (auto v : seeds) {
    const auto r = naive_reach(inst.graph(), {v});
    for (NodeId x = 0; x < r.size(); ++x) surv[inst.node_user(x)] *= 1.0 - r[x];
  }
  double mass = 0.0;
  for (double s : surv) mass += 1.0 - s;
  return mass;
}

// All three terms from scratch. Social coverage of a user is the noisy-or
// over seeds of single-seed reach probabilities.
inline NaivePhi naive_phi(const ProblemInstance& inst, const std::vector<SlotIndex>& slots,
                          const std::vector<NodeId>& seeds) {
  NaivePhi out;
  const auto cov = naive_coverage(inst.matrix(), slots);
  for (double c : cov) out.billboard += c;
  out.social = naive_spread(inst.graph(), seeds);

  std::vector<double> soc_surv(inst.universe().size(), 1.0);
  for (auto v : seeds) {
    const auto r = naive_reach(inst.graph(), {v});
    for (NodeId x = 0; x < r.size(); ++x) soc_surv[inst.node_user(x)] *= 1.0 - r[x];
  }
  for (std::size_t u = 0; u < cov.size(); ++u) out.interaction += cov[u] * (1.0 - soc_surv[u]);
  return out;
}

inline std::vector<SlotIndex> slots_of(std::uint32_t mask) {
  std::vector<SlotIndex> out;
  for (SlotIndex i = 0; i < 32; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

inline std::vector<NodeId> seeds_of(std::uint32_t mask) {
  std::vector<NodeId> out;
  for (NodeId i = 0; i < 32; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

}  // namespace fixtures

#include "splitmax/diffusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace splitmax {

std::string model_name(const EdgeProbabilityModel& model) {
  struct Visitor {
    std::string operator()(const UniformProbability&) const { return "uniform"; }
    std::string operator()(const WeightedCascade& wc) const {
      return wc.use_out_degree ? "wc-out" : "wc";
    }
    std::string operator()(const Trivalency&) const { return "trivalency"; }
    std::string operator()(const ExplicitProbability&) const { return "explicit"; }
  };
  return std::visit(Visitor{}, model);
}

EdgeProbabilityModel parse_probability_model(const std::string& name, double pc,
                                             std::uint64_t seed) {
  if (name == "uniform") return UniformProbability{pc};
  if (name == "wc") return WeightedCascade{false};
  if (name == "wc-out") return WeightedCascade{true};
  if (name == "trivalency") return Trivalency{seed};
  if (name == "explicit") return ExplicitProbability{};
  throw ConfigError("unknown probability model '" + name + "'");
}

SocialGraph assign_probabilities(const SocialGraph& graph,
                                 const EdgeProbabilityModel& model) {
  const auto edges = graph.edges();
  std::vector<double> probs(edges.size());
  if (const auto* uniform = std::get_if<UniformProbability>(&model)) {
    if (!(uniform->pc > 0.0 && uniform->pc <= 1.0)) {
      throw ConfigError("uniform probability pc must be in (0,1]");
    }
    std::fill(probs.begin(), probs.end(), uniform->pc);
  } else if (const auto* wc = std::get_if<WeightedCascade>(&model)) {
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const auto deg = wc->use_out_degree ? graph.out_degree(edges[i].src)
                                          : graph.in_degree(edges[i].dst);
      probs[i] = 1.0 / static_cast<double>(deg);
    }
  } else if (const auto* tri = std::get_if<Trivalency>(&model)) {
    static constexpr double kLevels[] = {0.1, 0.01, 0.001};
    std::mt19937_64 rng(tri->seed);
    std::uniform_int_distribution<int> pick(0, 2);
    for (auto& p : probs) p = kLevels[pick(rng)];
  } else {
    return graph;
  }
  return graph.with_probabilities(probs);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

SimulationStream::SimulationStream(std::uint64_t base_seed, std::uint64_t simulation)
    : key_(splitmix64(splitmix64(base_seed) ^ (simulation * 0xD1B54A32D192ED03ULL))) {}

double SimulationStream::uniform(std::size_t edge_index) const {
  const std::uint64_t bits =
      splitmix64(key_ ^ (static_cast<std::uint64_t>(edge_index) * 0x8CB92BA72F3D8DD7ULL));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

namespace {

void check_seeds(const SocialGraph& graph, std::span<const NodeId> seeds) {
  for (NodeId s : seeds) {
    if (s >= graph.node_count()) throw std::out_of_range("seed not in graph");
  }
}

// Breadth-first cascade reusing caller-owned scratch; marks reached nodes
// with `epoch` in `stamp` and returns how many were newly reached. Nodes
// for which `blocked` returns true are treated as already active.
template <class Blocked>
std::size_t cascade(const SocialGraph& graph, std::span<const NodeId> sources,
                    const SimulationStream& stream, std::vector<std::uint32_t>& stamp,
                    std::uint32_t epoch, std::vector<NodeId>& queue, Blocked blocked) {
  queue.clear();
  for (NodeId s : sources) {
    if (stamp[s] == epoch || blocked(s)) continue;
    stamp[s] = epoch;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const NodeId u = queue[head];
    const std::size_t base = graph.first_edge(u);
    const auto out = graph.out_edges(u);
    for (std::size_t k = 0; k < out.size(); ++k) {
      const NodeId v = out[k].dst;
      if (stamp[v] == epoch || blocked(v)) continue;
      if (stream.live(base + k, out[k].prob)) {
        stamp[v] = epoch;
        queue.push_back(v);
      }
    }
  }
  return queue.size();
}

struct RunningStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  SpreadEstimate estimate() const {
    SpreadEstimate out{mean, 0.0, n};
    if (n > 1) out.std_error = std::sqrt(m2 / static_cast<double>(n - 1)) /
                               std::sqrt(static_cast<double>(n));
    return out;
  }
};

void require_exact_size(const SocialGraph& graph) {
  if (graph.edge_count() > kMaxExactEdges) {
    throw ConfigError("exact evaluation supports at most " +
                      std::to_string(kMaxExactEdges) + " edges, graph has " +
                      std::to_string(graph.edge_count()));
  }
}

}  // namespace

std::vector<NodeId> simulate_once(const SocialGraph& graph,
                                  std::span<const NodeId> seeds,
                                  const SimulationStream& stream) {
  check_seeds(graph, seeds);
  std::vector<std::uint32_t> stamp(graph.node_count(), 0);
  std::vector<NodeId> queue;
  cascade(graph, seeds, stream, stamp, 1, queue, [](NodeId) { return false; });
  std::sort(queue.begin(), queue.end());
  return queue;
}

SpreadEstimate estimate_spread(const SocialGraph& graph,
                               std::span<const NodeId> seeds,
                               std::size_t simulations, std::uint64_t rng_seed) {
  if (simulations == 0) throw ConfigError("simulation count must be >= 1");
  check_seeds(graph, seeds);
  if (seeds.empty()) return {0.0, 0.0, simulations};
  std::vector<std::uint32_t> stamp(graph.node_count(), 0);
  std::vector<NodeId> queue;
  RunningStats stats;
  for (std::size_t i = 0; i < simulations; ++i) {
    const SimulationStream stream(rng_seed, i);
    const auto reached = cascade(graph, seeds, stream, stamp,
                                 static_cast<std::uint32_t>(i + 1), queue,
                                 [](NodeId) { return false; });
    stats.push(static_cast<double>(reached));
  }
  return stats.estimate();
}

double exact_spread(const SocialGraph& graph, std::span<const NodeId> seeds) {
  require_exact_size(graph);
  check_seeds(graph, seeds);
  if (seeds.empty()) return 0.0;
  const auto edges = graph.edges();
  const std::size_t m = edges.size();
  const std::size_t n = graph.node_count();
  std::vector<char> active(n);
  std::vector<NodeId> queue;
  double total = 0.0;
  for (std::uint64_t world = 0; world < (std::uint64_t{1} << m); ++world) {
    double weight = 1.0;
    for (std::size_t e = 0; e < m; ++e) {
      weight *= (world >> e & 1) ? edges[e].prob : 1.0 - edges[e].prob;
    }
    if (weight == 0.0) continue;
    std::fill(active.begin(), active.end(), 0);
    queue.assign(seeds.begin(), seeds.end());
    for (NodeId s : seeds) active[s] = 1;
    std::size_t count = static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (std::size_t e = graph.first_edge(u); e < graph.first_edge(u) + graph.out_degree(u); ++e) {
        if (!(world >> e & 1) || active[edges[e].dst]) continue;
        active[edges[e].dst] = 1;
        ++count;
        queue.push_back(edges[e].dst);
      }
    }
    total += weight * static_cast<double>(count);
  }
  return total;
}

ActivationMap activation_probability(const SocialGraph& graph, NodeId seed,
                                     std::size_t simulations,
                                     std::uint64_t rng_seed) {
  if (simulations == 0) throw ConfigError("simulation count must be >= 1");
  const NodeId seeds[] = {seed};
  check_seeds(graph, seeds);
  std::vector<std::uint32_t> stamp(graph.node_count(), 0);
  std::vector<std::uint32_t> hits(graph.node_count(), 0);
  std::vector<NodeId> queue;
  for (std::size_t i = 0; i < simulations; ++i) {
    const SimulationStream stream(rng_seed, i);
    cascade(graph, seeds, stream, stamp, static_cast<std::uint32_t>(i + 1), queue,
            [](NodeId) { return false; });
    for (NodeId v : queue) ++hits[v];
  }
  ActivationMap out;
  for (NodeId v = 0; v < hits.size(); ++v) {
    if (hits[v] > 0) {
      out.emplace_back(v, static_cast<double>(hits[v]) / static_cast<double>(simulations));
    }
  }
  return out;
}

ActivationMap exact_activation_probability(const SocialGraph& graph, NodeId seed) {
  require_exact_size(graph);
  const NodeId seeds[] = {seed};
  check_seeds(graph, seeds);
  const auto edges = graph.edges();
  const std::size_t m = edges.size();
  std::vector<double> prob(graph.node_count(), 0.0);
  std::vector<char> active(graph.node_count());
  std::vector<NodeId> queue;
  for (std::uint64_t world = 0; world < (std::uint64_t{1} << m); ++world) {
    double weight = 1.0;
    for (std::size_t e = 0; e < m; ++e) {
      weight *= (world >> e & 1) ? edges[e].prob : 1.0 - edges[e].prob;
    }
    if (weight == 0.0) continue;
    std::fill(active.begin(), active.end(), 0);
    active[seed] = 1;
    queue.assign(1, seed);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const NodeId u = queue[head];
      for (std::size_t e = graph.first_edge(u); e < graph.first_edge(u) + graph.out_degree(u); ++e) {
        if (!(world >> e & 1) || active[edges[e].dst]) continue;
        active[edges[e].dst] = 1;
        queue.push_back(edges[e].dst);
      }
    }
    for (NodeId v : queue) prob[v] += weight;
  }
  ActivationMap out;
  for (NodeId v = 0; v < prob.size(); ++v) {
    if (v == seed) {
      out.emplace_back(v, 1.0);
    } else if (prob[v] > 0.0) {
      out.emplace_back(v, prob[v]);
    }
  }
  return out;
}

std::size_t ActivationCache::KeyHash::operator()(const Key& k) const noexcept {
  return static_cast<std::size_t>(
      splitmix64(splitmix64(k.seed) ^ splitmix64(k.simulations) ^ k.rng_seed));
}

ActivationCache::ActivationCache(const SocialGraph& graph, std::size_t capacity)
    : graph_(&graph), capacity_(std::max<std::size_t>(capacity, 1)) {}

std::shared_ptr<const ActivationMap> ActivationCache::get(NodeId seed,
                                                          std::size_t simulations,
                                                          std::uint64_t rng_seed) {
  const Key key{seed, simulations, rng_seed};
  {
    std::lock_guard lock(mutex_);
    if (auto it = index_.find(key); it != index_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      return it->second->second;
    }
  }
  auto computed = std::make_shared<const ActivationMap>(
      activation_probability(*graph_, seed, simulations, rng_seed));
  std::lock_guard lock(mutex_);
  if (auto it = index_.find(key); it != index_.end()) return it->second->second;
  ++misses_;
  order_.emplace_front(key, computed);
  index_.emplace(key, order_.begin());
  while (order_.size() > capacity_) {
    index_.erase(order_.back().first);
    order_.pop_back();
  }
  return computed;
}

std::size_t ActivationCache::size() const {
  std::lock_guard lock(mutex_);
  return order_.size();
}

std::size_t ActivationCache::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

namespace {

class MonteCarloEngine;

class MonteCarloCursor final : public SpreadCursor {
 public:
  MonteCarloCursor(const SocialGraph& graph, std::size_t simulations,
                   std::uint64_t rng_seed)
      : graph_(&graph),
        simulations_(simulations),
        rng_seed_(rng_seed),
        words_((graph.node_count() + 63) / 64),
        active_(simulations * words_, 0),
        counts_(simulations, 0),
        stamp_(graph.node_count(), 0) {}

  SpreadEstimate gain(NodeId seed) const override {
    check(seed);
    RunningStats stats;
    for (std::size_t i = 0; i < simulations_; ++i) {
      stats.push(static_cast<double>(grow(i, seed)));
    }
    return stats.estimate();
  }

  void add(NodeId seed) override {
    check(seed);
    for (std::size_t i = 0; i < simulations_; ++i) {
      counts_[i] += static_cast<std::uint32_t>(grow(i, seed));
      std::uint64_t* bits = active_.data() + i * words_;
      for (NodeId v : queue_) bits[v / 64] |= std::uint64_t{1} << (v % 64);
    }
  }

  SpreadEstimate value() const override {
    RunningStats stats;
    for (auto c : counts_) stats.push(static_cast<double>(c));
    return stats.estimate();
  }

  std::unique_ptr<SpreadCursor> clone() const override {
    return std::make_unique<MonteCarloCursor>(*this);
  }

 private:
  void check(NodeId seed) const {
    if (seed >= graph_->node_count()) throw std::out_of_range("seed not in graph");
  }

  // Nodes newly reached from `seed` in simulation i; leaves them in queue_.
  std::size_t grow(std::size_t i, NodeId seed) const {
    const std::uint64_t* bits = active_.data() + i * words_;
    if (++epoch_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      epoch_ = 1;
    }
    const NodeId sources[] = {seed};
    return cascade(*graph_, sources, SimulationStream(rng_seed_, i), stamp_, epoch_,
                   queue_, [bits](NodeId v) { return (bits[v / 64] >> (v % 64)) & 1; });
  }

  const SocialGraph* graph_;
  std::size_t simulations_;
  std::uint64_t rng_seed_;
  std::size_t words_;
  std::vector<std::uint64_t> active_;
  std::vector<std::uint32_t> counts_;
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t epoch_ = 0;
  mutable std::vector<NodeId> queue_;
};

class MonteCarloEngine final : public SpreadEngine {
 public:
  MonteCarloEngine(const SocialGraph& graph, std::size_t simulations,
                   std::uint64_t rng_seed, std::size_t cache_capacity)
      : graph_(&graph),
        simulations_(simulations),
        rng_seed_(rng_seed),
        cache_(graph, cache_capacity) {
    if (simulations == 0) throw ConfigError("simulation count must be >= 1");
  }

  SpreadEstimate spread(std::span<const NodeId> seeds) const override {
    return estimate_spread(*graph_, seeds, simulations_, rng_seed_);
  }
  std::shared_ptr<const ActivationMap> activation(NodeId seed) const override {
    return cache_.get(seed, simulations_, rng_seed_);
  }
  std::unique_ptr<SpreadCursor> cursor() const override {
    return std::make_unique<MonteCarloCursor>(*graph_, simulations_, rng_seed_);
  }
  bool exact() const override { return false; }

 private:
  const SocialGraph* graph_;
  std::size_t simulations_;
  std::uint64_t rng_seed_;
  mutable ActivationCache cache_;
};

// Exact spread by live-edge enumeration, one weakly connected component
// at a time, memoized per component seed mask.
class ExactEngine final : public SpreadEngine {
 public:
  struct LocalEdge {
    std::uint8_t src;
    std::uint8_t dst;
    double prob;
  };
  struct Component {
    std::vector<NodeId> nodes;
    std::vector<LocalEdge> edges;
  };

  explicit ExactEngine(const SocialGraph& graph) : graph_(&graph) {
    require_exact_size(graph);
    const std::size_t n = graph.node_count();
    std::vector<NodeId> parent(n);
    for (NodeId v = 0; v < n; ++v) parent[v] = v;
    auto find = [&](NodeId v) {
      while (parent[v] != v) v = parent[v] = parent[parent[v]];
      return v;
    };
    for (const auto& e : graph.edges()) parent[find(e.src)] = find(e.dst);
    std::vector<int> comp_of_root(n, -1);
    comp_.resize(n);
    local_.resize(n);
    for (NodeId v = 0; v < n; ++v) {
      const NodeId r = find(v);
      if (comp_of_root[r] < 0) {
        comp_of_root[r] = static_cast<int>(components_.size());
        components_.emplace_back();
      }
      comp_[v] = static_cast<std::uint32_t>(comp_of_root[r]);
      local_[v] = static_cast<std::uint8_t>(components_[comp_[v]].nodes.size());
      components_[comp_[v]].nodes.push_back(v);
    }
    for (const auto& e : graph.edges()) {
      components_[comp_[e.src]].edges.push_back({local_[e.src], local_[e.dst], e.prob});
    }
    memo_.resize(components_.size());
    weights_.resize(components_.size());
    activation_.resize(n);
  }

  SpreadEstimate spread(std::span<const NodeId> seeds) const override {
    check_seeds(*graph_, seeds);
    std::vector<std::pair<std::uint32_t, std::uint64_t>> masks;
    for (NodeId s : seeds) {
      auto it = std::find_if(masks.begin(), masks.end(),
                             [&](const auto& m) { return m.first == comp_[s]; });
      if (it == masks.end()) {
        masks.emplace_back(comp_[s], 0);
        it = masks.end() - 1;
      }
      it->second |= std::uint64_t{1} << local_[s];
    }
    double total = 0.0;
    for (const auto& [c, mask] : masks) total += component_spread(c, mask);
    return {total, 0.0, 0};
  }

  std::shared_ptr<const ActivationMap> activation(NodeId seed) const override {
    if (seed >= graph_->node_count()) throw std::out_of_range("seed not in graph");
    std::lock_guard lock(mutex_);
    if (!activation_[seed]) activation_[seed] = compute_activation(seed);
    return activation_[seed];
  }

  std::unique_ptr<SpreadCursor> cursor() const override;
  bool exact() const override { return true; }

  double component_spread(std::uint32_t c, std::uint64_t mask) const {
    const auto& comp = components_[c];
    if (comp.edges.empty() || mask == 0) return static_cast<double>(std::popcount(mask));
    std::lock_guard lock(mutex_);
    if (auto it = memo_[c].find(mask); it != memo_[c].end()) return it->second;
    const auto& weights = world_weights(c);
    double total = 0.0;
    for (std::uint64_t world = 0; world < weights.size(); ++world) {
      if (weights[world] == 0.0) continue;
      total += weights[world] * std::popcount(reach(comp, world, mask));
    }
    memo_[c].emplace(mask, total);
    return total;
  }

  std::uint32_t component_of(NodeId v) const { return comp_[v]; }
  std::uint8_t local_index(NodeId v) const { return local_[v]; }
  std::size_t component_count() const { return components_.size(); }

 private:
  static std::uint64_t reach(const Component& comp, std::uint64_t world,
                             std::uint64_t mask) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t j = 0; j < comp.edges.size(); ++j) {
        if (!(world >> j & 1)) continue;
        const auto& e = comp.edges[j];
        if ((mask >> e.src & 1) && !(mask >> e.dst & 1)) {
          mask |= std::uint64_t{1} << e.dst;
          changed = true;
        }
      }
    }
    return mask;
  }

  // Caller holds mutex_.
  const std::vector<double>& world_weights(std::uint32_t c) const {
    auto& w = weights_[c];
    if (!w.empty()) return w;
    const auto& edges = components_[c].edges;
    w.assign(std::size_t{1} << edges.size(), 1.0);
    for (std::size_t world = 0; world < w.size(); ++world) {
      for (std::size_t j = 0; j < edges.size(); ++j) {
        w[world] *= (world >> j & 1) ? edges[j].prob : 1.0 - edges[j].prob;
      }
    }
    return w;
  }

  // Caller holds mutex_.
  std::shared_ptr<const ActivationMap> compute_activation(NodeId seed) const {
    const std::uint32_t c = comp_[seed];
    const auto& comp = components_[c];
    std::vector<double> prob(comp.nodes.size(), 0.0);
    if (comp.edges.empty()) {
      prob[local_[seed]] = 1.0;
    } else {
      const auto& weights = world_weights(c);
      const std::uint64_t start = std::uint64_t{1} << local_[seed];
      for (std::uint64_t world = 0; world < weights.size(); ++world) {
        if (weights[world] == 0.0) continue;
        const std::uint64_t r = reach(comp, world, start);
        for (std::size_t k = 0; k < comp.nodes.size(); ++k) {
          if (r >> k & 1) prob[k] += weights[world];
        }
      }
      prob[local_[seed]] = 1.0;
    }
    ActivationMap out;
    for (std::size_t k = 0; k < comp.nodes.size(); ++k) {
      if (prob[k] > 0.0) out.emplace_back(comp.nodes[k], prob[k]);
    }
    std::sort(out.begin(), out.end());
    return std::make_shared<const ActivationMap>(std::move(out));
  }

  const SocialGraph* graph_;
  std::vector<Component> components_;
  std::vector<std::uint32_t> comp_;
  std::vector<std::uint8_t> local_;
  mutable std::mutex mutex_;
  mutable std::vector<std::unordered_map<std::uint64_t, double>> memo_;
  mutable std::vector<std::vector<double>> weights_;
  mutable std::vector<std::shared_ptr<const ActivationMap>> activation_;
};

class ExactCursor final : public SpreadCursor {
 public:
  explicit ExactCursor(const ExactEngine& engine)
      : engine_(&engine), masks_(engine.component_count(), 0) {}

  SpreadEstimate gain(NodeId seed) const override {
    const auto c = engine_->component_of(seed);
    const std::uint64_t bit = std::uint64_t{1} << engine_->local_index(seed);
    if (masks_[c] & bit) return {0.0, 0.0, 0};
    return {engine_->component_spread(c, masks_[c] | bit) -
                engine_->component_spread(c, masks_[c]),
            0.0, 0};
  }

  void add(NodeId seed) override {
    const auto g = gain(seed);
    masks_[engine_->component_of(seed)] |= std::uint64_t{1} << engine_->local_index(seed);
    total_ += g.mean;
  }

  SpreadEstimate value() const override { return {total_, 0.0, 0}; }

  std::unique_ptr<SpreadCursor> clone() const override {
    return std::make_unique<ExactCursor>(*this);
  }

 private:
  const ExactEngine* engine_;
  std::vector<std::uint64_t> masks_;
  double total_ = 0.0;
};

std::unique_ptr<SpreadCursor> ExactEngine::cursor() const {
  return std::make_unique<ExactCursor>(*this);
}

}  // namespace

std::unique_ptr<SpreadEngine> make_monte_carlo_engine(const SocialGraph& graph,
                                                      std::size_t simulations,
                                                      std::uint64_t rng_seed,
                                                      std::size_t cache_capacity) {
  return std::make_unique<MonteCarloEngine>(graph, simulations, rng_seed, cache_capacity);
}

std::unique_ptr<SpreadEngine> make_exact_engine(const SocialGraph& graph) {
  return std::make_unique<ExactEngine>(graph);
}

}  // namespace splitmax

#include "splitmax/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <tuple>

namespace splitmax {

namespace {

constexpr double kMoneyTolerance = 1e-9;

double ratio(double gain, Money cost) {
  if (cost > 0.0) return gain / cost;
  return gain > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

bool budget_left(Money remaining) { return remaining > kMoneyTolerance; }

std::vector<Candidate> all_candidates(const CombinedModel& model) {
  std::vector<Candidate> out;
  for (SlotIndex s = 0; s < model.instance().slot_count(); ++s) {
    out.push_back(Candidate::slot(s));
  }
  for (NodeId v = 0; v < model.instance().node_count(); ++v) {
    out.push_back(Candidate::seed(v));
  }
  return out;
}

// Owns the state of one optimizer run and turns it into a result.
class Run {
 public:
  Run(const CombinedModel& model, Money budget)
      : model_(model), state_(model), budget_(budget), remaining_(budget) {
    if (!(budget >= 0.0) || !std::isfinite(budget)) {
      throw ConfigError("budget must be finite and >= 0");
    }
  }

  const SelectionState& state() const { return state_; }
  Money remaining() const { return remaining_; }
  bool can_afford(Candidate c) const { return affordable(model_.cost(c), remaining_); }

  void commit(Candidate c, double gain) {
    state_.add(c);
    remaining_ -= model_.cost(c);
    if (remaining_ < 0.0) remaining_ = 0.0;
    trace_.steps.push_back({trace_.steps.size(), c, gain, remaining_});
  }
  void commit(Candidate c) { commit(c, state_.gain(c).value); }

  OptimizerResult finish() const {
    OptimizerResult out;
    auto& sol = out.solution;
    sol.slots.assign(state_.slots().begin(), state_.slots().end());
    sol.seeds.assign(state_.seeds().begin(), state_.seeds().end());
    sol.budget = budget_;
    sol.spent_billboard = state_.spent_billboard();
    sol.spent_social = state_.spent_social();
    sol.phi = model_.phi(sol.slots, sol.seeds);
    sol.exact = model_.mode().is_exact();
    out.trace = trace_;
    return out;
  }

 private:
  const CombinedModel& model_;
  SelectionState state_;
  Money budget_;
  Money remaining_;
  GreedyTrace trace_;
};

// Takes candidates in the given order, skipping those that do not fit.
OptimizerResult take_in_order(const CombinedModel& model, Money budget,
                              std::span<const Candidate> order) {
  Run run(model, budget);
  for (const auto& c : order) {
    if (run.can_afford(c)) run.commit(c);
  }
  return run.finish();
}

// Channel-native singleton influence: I({b}) for slots, spread({s}) for seeds.
std::vector<double> singleton_scores(const CombinedModel& model,
                                     std::span<const Candidate> items) {
  const auto empty = model.start();
  std::vector<double> out;
  out.reserve(items.size());
  for (const auto& c : items) out.push_back(empty.gain(c).value);
  return out;
}

// Merges per-channel scores into one selection order.
std::vector<Candidate> merge_channels(const CombinedModel& model,
                                      std::span<const double> slot_scores,
                                      std::span<const double> seed_scores,
                                      MergeRule rule) {
  auto ranked = [&](std::span<const double> scores, CandidateKind kind) {
    std::vector<Candidate> items;
    for (std::uint32_t i = 0; i < scores.size(); ++i) items.push_back({kind, i});
    std::stable_sort(items.begin(), items.end(), [&](const Candidate& a, const Candidate& b) {
      if (scores[a.index] != scores[b.index]) return scores[a.index] > scores[b.index];
      const Money ca = model.cost(a);
      const Money cb = model.cost(b);
      if (ca != cb) return ca < cb;
      return a.index < b.index;
    });
    return items;
  };
  const auto slots = ranked(slot_scores, CandidateKind::kSlot);
  const auto seeds = ranked(seed_scores, CandidateKind::kSeed);
  std::vector<Candidate> out;
  out.reserve(slots.size() + seeds.size());
  if (rule == MergeRule::kAlternate) {
    for (std::size_t i = 0; i < std::max(slots.size(), seeds.size()); ++i) {
      if (i < slots.size()) out.push_back(slots[i]);
      if (i < seeds.size()) out.push_back(seeds[i]);
    }
    return out;
  }
  // Normalized rank (n - r) / n, r zero-based; ties keep slots first.
  struct Scored {
    double score;
    std::size_t rank;
    Candidate c;
  };
  std::vector<Scored> scored;
  for (std::size_t r = 0; r < slots.size(); ++r) {
    scored.push_back({static_cast<double>(slots.size() - r) / static_cast<double>(slots.size()),
                      r, slots[r]});
  }
  for (std::size_t r = 0; r < seeds.size(); ++r) {
    scored.push_back({static_cast<double>(seeds.size() - r) / static_cast<double>(seeds.size()),
                      r, seeds[r]});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::tie(a.c.kind, a.rank) < std::tie(b.c.kind, b.rank);
  });
  for (const auto& s : scored) out.push_back(s.c);
  return out;
}

// Preference among equal gain-per-cost: lower cost, then slot, then lower id.
bool preferred(double ra, Money ca, Candidate a, double rb, Money cb, Candidate b) {
  if (ra != rb) return ra > rb;
  if (ca != cb) return ca < cb;
  return a < b;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::uint64_t below(std::uint64_t n) { return gen_() % n; }

 private:
  std::mt19937_64 gen_;
};

// Partial Fisher-Yates: `count` distinct draws from `pool`.
std::vector<std::uint32_t> sample(std::span<const std::uint32_t> pool, std::size_t count,
                                  Rng& rng) {
  std::vector<std::uint32_t> items(pool.begin(), pool.end());
  count = std::min(count, items.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(items[i], items[i + rng.below(items.size() - i)]);
  }
  items.resize(count);
  return items;
}

}  // namespace

bool affordable(Money cost, Money remaining) {
  return cost <= remaining + kMoneyTolerance;
}

OptimizerResult randomized_greedy(const CombinedModel& model, Money budget,
                                  const RandomizedGreedyOptions& options) {
  if (!(options.epsilon > 0.0 && options.epsilon < 1.0)) {
    throw ConfigError("epsilon must be in (0, 1)");
  }
  Run run(model, budget);
  const auto& inst = model.instance();

  std::vector<std::uint32_t> slot_pool(inst.slot_count());
  std::vector<std::uint32_t> seed_pool(inst.node_count());
  std::iota(slot_pool.begin(), slot_pool.end(), 0u);
  std::iota(seed_pool.begin(), seed_pool.end(), 0u);

  // Cardinality estimate: pack each channel in ascending singleton
  // influence until its own copy of the budget runs out.
  auto pack_count = [&](CandidateKind kind, std::span<const std::uint32_t> pool) {
    std::vector<Candidate> items;
    for (auto i : pool) items.push_back({kind, i});
    const auto scores = singleton_scores(model, items);
    std::vector<std::size_t> order(items.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    Money left = budget;
    std::size_t count = 0;
    for (auto i : order) {
      if (!(left > 0.0)) break;
      left -= model.cost(items[i]);
      ++count;
    }
    return count;
  };
  const std::size_t k_slots = pack_count(CandidateKind::kSlot, slot_pool);
  const std::size_t k_seeds = pack_count(CandidateKind::kSeed, seed_pool);
  std::size_t k = std::min(k_slots, k_seeds);
  if (slot_pool.empty()) k = k_seeds;
  if (seed_pool.empty()) k = k_slots;
  k = std::max<std::size_t>(k, 1);

  const double log_term = std::log(1.0 / options.epsilon);
  auto sample_size = [&](std::size_t pool) -> std::size_t {
    if (pool == 0) return 0;
    if (options.full_sampling) return pool;
    const double want =
        std::ceil(static_cast<double>(pool) / static_cast<double>(k) * log_term);
    return std::clamp<std::size_t>(static_cast<std::size_t>(want), 1, pool);
  };

  struct Best {
    Candidate c;
    Gain gain;
    Money cost = 0.0;
    double ratio = -1.0;
    bool valid = false;
  };
  auto best_of = [&](CandidateKind kind, std::span<const std::uint32_t> picks) {
    Best best;
    for (auto i : picks) {
      const Candidate c{kind, i};
      const Gain g = run.state().gain(c);
      const Money cost = model.cost(c);
      const double r = ratio(g.value, cost);
      if (!best.valid || preferred(r, cost, c, best.ratio, best.cost, best.c)) {
        best = {c, g, cost, r, true};
      }
    }
    return best;
  };

  Rng rng(options.rng_seed);
  while (budget_left(run.remaining()) && (!slot_pool.empty() || !seed_pool.empty())) {
    const auto slot_pick = sample(slot_pool, sample_size(slot_pool.size()), rng);
    const auto seed_pick = sample(seed_pool, sample_size(seed_pool.size()), rng);
    const Best b = best_of(CandidateKind::kSlot, slot_pick);
    const Best s = best_of(CandidateKind::kSeed, seed_pick);

    bool take_slot = b.valid;
    if (b.valid && s.valid) {
      if (model.mode().is_exact()) {
        take_slot = b.ratio >= s.ratio;
      } else {
        const double se = std::hypot(b.gain.std_error / std::max(b.cost, 1e-300),
                                     s.gain.std_error / std::max(s.cost, 1e-300));
        const double diff = b.ratio - s.ratio;
        if (se > 0.0 && std::abs(diff) <= options.deadband_sigmas * se) {
          take_slot = b.cost <= s.cost;
        } else {
          take_slot = diff >= 0.0;
        }
      }
    }
    const Best& w = take_slot ? b : s;
    if (run.can_afford(w.c)) run.commit(w.c, w.gain.value);
    auto& pool = take_slot ? slot_pool : seed_pool;
    pool.erase(std::find(pool.begin(), pool.end(), w.c.index));
  }
  return run.finish();
}

OptimizerResult tpg(const CombinedModel& model, Money budget) {
  Run run(model, budget);
  const auto& inst = model.instance();

  // Phase I: best singleton ratio per channel.
  auto best_singleton = [&](CandidateKind kind, std::size_t n) -> std::optional<Candidate> {
    std::optional<Candidate> best;
    double best_ratio = 0.0;
    for (std::uint32_t i = 0; i < n; ++i) {
      const Candidate c{kind, i};
      const double r = ratio(run.state().gain(c).value, model.cost(c));
      if (!best || preferred(r, model.cost(c), c, best_ratio, model.cost(*best), *best)) {
        best = c;
        best_ratio = r;
      }
    }
    return best;
  };
  const auto b0 = best_singleton(CandidateKind::kSlot, inst.slot_count());
  const auto s0 = best_singleton(CandidateKind::kSeed, inst.node_count());
  if (b0 && s0 && affordable(model.cost(*b0) + model.cost(*s0), run.remaining())) {
    run.commit(*b0);
    run.commit(*s0);
  } else if (b0 || s0) {
    auto ratio_of = [&](const std::optional<Candidate>& c) {
      return c ? ratio(run.state().gain(*c).value, model.cost(*c))
               : -std::numeric_limits<double>::infinity();
    };
    const bool slot_better = ratio_of(b0) >= ratio_of(s0);
    const auto& first = slot_better ? b0 : s0;
    const auto& second = slot_better ? s0 : b0;
    if (first && run.can_afford(*first)) {
      run.commit(*first);
    } else if (second && run.can_afford(*second)) {
      run.commit(*second);
    }
  }

  // Phase II: lazy greedy. Keys are either the exact ratio at the current
  // stamp or a bound that holds for every later selection; after a commit
  // exact keys fall back to their stored bounds since Phi is not
  // submodular and old gains may understate new ones.
  struct Entry {
    double key;
    double bound;
    double gain;
    Money cost;
    Candidate c;
    std::size_t stamp;
    bool exact;
  };
  auto before = [](const Entry& a, const Entry& b) {
    // Heap comparator: true when a ranks below b.
    if (a.key != b.key) return a.key < b.key;
    if (a.cost != b.cost) return a.cost > b.cost;
    return b.c < a.c;
  };
  std::vector<Entry> heap;
  for (const auto& c : all_candidates(model)) {
    if (run.state().contains(c)) continue;
    const Money cost = model.cost(c);
    const double bound = ratio(run.state().gain_bound(c), cost);
    heap.push_back({bound, bound, 0.0, cost, c, 0, false});
  }
  std::make_heap(heap.begin(), heap.end(), before);

  std::size_t stamp = 0;
  while (budget_left(run.remaining()) && !heap.empty()) {
    std::pop_heap(heap.begin(), heap.end(), before);
    Entry e = heap.back();
    heap.pop_back();
    if (!run.can_afford(e.c)) continue;

    if (!(e.exact && e.stamp == stamp)) {
      double raw_bound = 0.0;
      e.gain = run.state().gain(e.c, raw_bound).value;
      e.key = ratio(e.gain, e.cost);
      e.bound = ratio(raw_bound, e.cost);
      e.exact = true;
      e.stamp = stamp;
    }
    if (heap.empty() || e.key >= heap.front().key) {
      run.commit(e.c, e.gain);
      ++stamp;
      for (auto& x : heap) {
        if (x.exact) {
          x.key = x.bound;
          x.exact = false;
        }
      }
      std::make_heap(heap.begin(), heap.end(), before);
    } else {
      heap.push_back(e);
      std::push_heap(heap.begin(), heap.end(), before);
    }
  }
  return run.finish();
}

OptimizerResult baseline_random(const CombinedModel& model, Money budget,
                                std::uint64_t rng_seed) {
  Run run(model, budget);
  Rng rng(rng_seed);
  auto pool = all_candidates(model);
  for (;;) {
    std::vector<Candidate> fits;
    for (const auto& c : pool) {
      if (run.can_afford(c)) fits.push_back(c);
    }
    if (fits.empty()) break;
    const Candidate pick = fits[rng.below(fits.size())];
    run.commit(pick);
    pool.erase(std::find(pool.begin(), pool.end(), pick));
  }
  return run.finish();
}

OptimizerResult baseline_top_k(const CombinedModel& model, Money budget) {
  auto items = all_candidates(model);
  const auto scores = singleton_scores(model, items);
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    const Money ca = model.cost(items[a]);
    const Money cb = model.cost(items[b]);
    if (ca != cb) return ca < cb;
    return items[a] < items[b];
  });
  std::vector<Candidate> sorted;
  for (auto i : order) sorted.push_back(items[i]);
  return take_in_order(model, budget, sorted);
}

OptimizerResult baseline_hdh(const CombinedModel& model, Money budget, MergeRule merge) {
  const auto& inst = model.instance();
  std::vector<double> slot_scores(inst.slot_count());
  for (SlotIndex s = 0; s < inst.slot_count(); ++s) {
    slot_scores[s] = static_cast<double>(inst.matrix().row(s).size());
  }
  std::vector<double> seed_scores(inst.node_count());
  for (NodeId v = 0; v < inst.node_count(); ++v) {
    seed_scores[v] = static_cast<double>(inst.graph().out_degree(v));
  }
  const auto order = merge_channels(model, slot_scores, seed_scores, merge);
  return take_in_order(model, budget, order);
}

PageRankResult pagerank(const SocialGraph& graph, const PageRankOptions& options) {
  if (!(options.damping >= 0.0 && options.damping <= 1.0)) {
    throw ConfigError("damping must be in [0, 1]");
  }
  PageRankResult out;
  const std::size_t n = graph.node_count();
  if (n == 0) {
    out.converged = true;
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> pr(n, inv_n);
  std::vector<double> next(n);
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u) {
      if (graph.out_degree(u) == 0) dangling += pr[u];
    }
    const double base = (1.0 - options.damping) * inv_n + options.damping * dangling * inv_n;
    std::fill(next.begin(), next.end(), base);
    for (NodeId u = 0; u < n; ++u) {
      const auto deg = graph.out_degree(u);
      if (deg == 0) continue;
      const double share = options.damping * pr[u] / deg;
      for (const auto& e : graph.out_edges(u)) next[e.dst] += share;
    }
    double delta = 0.0;
    for (std::size_t v = 0; v < n; ++v) delta += std::abs(next[v] - pr[v]);
    pr.swap(next);
    out.iterations = it + 1;
    if (delta < options.tolerance) {
      out.converged = true;
      break;
    }
  }
  out.scores = std::move(pr);
  return out;
}

OptimizerResult baseline_pagerank(const CombinedModel& model, Money budget,
                                  const PageRankOptions& options, MergeRule merge) {
  const auto& inst = model.instance();
  std::vector<Candidate> slots;
  for (SlotIndex s = 0; s < inst.slot_count(); ++s) slots.push_back(Candidate::slot(s));
  const auto slot_scores = singleton_scores(model, slots);
  const auto pr = pagerank(inst.graph(), options);
  const auto order = merge_channels(model, slot_scores, pr.scores, merge);
  return take_in_order(model, budget, order);
}

std::string algorithm_name(Algorithm algo) {
  switch (algo) {
    case Algorithm::kRandomizedGreedy: return "rg";
    case Algorithm::kTpg: return "tpg";
    case Algorithm::kRandom: return "random";
    case Algorithm::kTopK: return "topk";
    case Algorithm::kHdh: return "hdh";
    case Algorithm::kPageRank: return "pagerank";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (auto a : {Algorithm::kRandomizedGreedy, Algorithm::kTpg, Algorithm::kRandom,
                 Algorithm::kTopK, Algorithm::kHdh, Algorithm::kPageRank}) {
    if (algorithm_name(a) == name) return a;
  }
  throw ConfigError("unknown algorithm '" + name + "'");
}

MergeRule parse_merge_rule(const std::string& name) {
  if (name == "rank") return MergeRule::kRank;
  if (name == "alternate") return MergeRule::kAlternate;
  throw ConfigError("unknown merge rule '" + name + "'");
}

OptimizerResult run_algorithm(Algorithm algo, const CombinedModel& model, Money budget,
                              const RunOptions& options) {
  switch (algo) {
    case Algorithm::kRandomizedGreedy:
      return randomized_greedy(model, budget,
                               {options.epsilon, options.full_sampling, options.rng_seed, 3.0});
    case Algorithm::kTpg: return tpg(model, budget);
    case Algorithm::kRandom: return baseline_random(model, budget, options.rng_seed);
    case Algorithm::kTopK: return baseline_top_k(model, budget);
    case Algorithm::kHdh: return baseline_hdh(model, budget, options.merge);
    case Algorithm::kPageRank:
      return baseline_pagerank(model, budget, options.pagerank, options.merge);
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace splitmax

#include "splitmax/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "splitmax/dataset.hpp"

namespace splitmax {

namespace {

// Gains at or below this are treated as zero denominators.
constexpr double kGainFloor = 1e-12;

std::vector<SlotIndex> slot_list(std::uint32_t mask) {
  std::vector<SlotIndex> out;
  for (SlotIndex i = 0; mask >> i; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

std::vector<NodeId> seed_list(std::uint32_t mask) {
  std::vector<NodeId> out;
  for (NodeId i = 0; mask >> i; ++i) {
    if (mask >> i & 1) out.push_back(i);
  }
  return out;
}

void require_side_size(const PhiTable& table, std::size_t max_elements) {
  if (table.slot_count() > max_elements || table.seed_count() > max_elements) {
    throw ConfigError("diagnostics enumerate at most " + std::to_string(max_elements) +
                      " elements per channel");
  }
}

// Visits every (slot mask, seed mask) view of the table as a one-channel
// function: f(mask) with the other channel fixed at `other`.
struct Channel {
  const PhiTable* table;
  bool slots;
  std::uint32_t other;

  std::size_t size() const { return slots ? table->slot_count() : table->seed_count(); }
  std::size_t other_size() const { return slots ? table->seed_count() : table->slot_count(); }
  double f(std::uint32_t mask) const {
    return slots ? table->at(mask, other) : table->at(other, mask);
  }
};

}  // namespace

PhiTable::PhiTable(const CombinedModel& model, std::size_t max_elements)
    : model_(&model),
      slot_count_(model.instance().slot_count()),
      seed_count_(model.instance().node_count()) {
  if (!model.mode().is_exact()) throw ConfigError("diagnostics require exact evaluation");
  const std::size_t cap = std::min(max_elements, kMaxBruteForceElements);
  if (slot_count_ + seed_count_ > cap) {
    throw ConfigError("brute force supports at most " + std::to_string(cap) +
                      " slots plus seeds, instance has " +
                      std::to_string(slot_count_ + seed_count_));
  }
  values_.resize(std::size_t{1} << (slot_count_ + seed_count_));
  for (std::uint32_t n = 0; n < (1u << seed_count_); ++n) {
    const auto seeds = seed_list(n);
    for (std::uint32_t s = 0; s < (1u << slot_count_); ++s) {
      values_[(static_cast<std::size_t>(n) << slot_count_) | s] =
          model.phi(slot_list(s), seeds).phi;
    }
  }
  slot_costs_.assign(std::size_t{1} << slot_count_, 0.0);
  for (std::uint32_t s = 1; s < slot_costs_.size(); ++s) {
    const auto low = static_cast<SlotIndex>(std::countr_zero(s));
    slot_costs_[s] = slot_costs_[s & (s - 1)] + model.instance().slot_cost(low);
  }
  seed_costs_.assign(std::size_t{1} << seed_count_, 0.0);
  for (std::uint32_t n = 1; n < seed_costs_.size(); ++n) {
    const auto low = static_cast<NodeId>(std::countr_zero(n));
    seed_costs_[n] = seed_costs_[n & (n - 1)] + model.instance().seed_cost(low);
  }
}

Money PhiTable::cost(std::uint32_t slot_mask, std::uint32_t seed_mask) const {
  return slot_costs_[slot_mask] + seed_costs_[seed_mask];
}

OracleSolution brute_force_optimum(const PhiTable& table, Money budget) {
  const auto& inst = table.model().instance();
  auto ids = [&](std::uint32_t s, std::uint32_t n) {
    std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> out;
    for (auto i : slot_list(s)) out.first.push_back(inst.slots().slots[i].id.value);
    for (auto v : seed_list(n)) out.second.push_back(inst.graph().user(v).value);
    std::sort(out.first.begin(), out.first.end());
    std::sort(out.second.begin(), out.second.end());
    return out;
  };
  OracleSolution best;
  std::uint32_t best_s = 0;
  std::uint32_t best_n = 0;
  bool found = false;
  for (std::uint32_t n = 0; n < (1u << table.seed_count()); ++n) {
    for (std::uint32_t s = 0; s < (1u << table.slot_count()); ++s) {
      if (!affordable(table.cost(s, n), budget)) continue;
      ++best.enumerated_count;
      const double v = table.at(s, n);
      if (!found || v > best.phi_opt ||
          (v == best.phi_opt && ids(s, n) < ids(best_s, best_n))) {
        best.phi_opt = v;
        best_s = s;
        best_n = n;
        found = true;
      }
    }
  }
  best.best_slots = slot_list(best_s);
  best.best_seeds = seed_list(best_n);
  return best;
}

OracleSolution brute_force_optimum(const CombinedModel& model, Money budget) {
  return brute_force_optimum(PhiTable(model), budget);
}

Measurement measure_gamma(const PhiTable& table, std::size_t max_elements) {
  require_side_size(table, max_elements);
  double worst = std::numeric_limits<double>::infinity();
  Measurement out;
  for (bool slots : {true, false}) {
    Channel ch{&table, slots, 0};
    const std::uint32_t full = (1u << ch.size()) - 1;
    for (std::uint32_t other = 0; other < (1u << ch.other_size()); ++other) {
      ch.other = other;
      for (std::uint32_t q = 0; q <= full; ++q) {
        const double base = ch.f(q);
        const std::uint32_t rest = full & ~q;
        // Omega ranges over non-empty subsets disjoint from q.
        for (std::uint32_t omega = rest; omega != 0; omega = (omega - 1) & rest) {
          const double joint = ch.f(q | omega) - base;
          if (!(joint > kGainFloor)) continue;
          double singles = 0.0;
          for (std::uint32_t m = omega; m != 0; m &= m - 1) {
            singles += ch.f(q | (m & (~m + 1))) - base;
          }
          worst = std::min(worst, singles / joint);
          ++out.cases;
        }
      }
    }
  }
  if (out.cases > 0) {
    out.defined = true;
    out.value = std::clamp(worst, std::numeric_limits<double>::min(), 1.0);
  }
  return out;
}

Measurement measure_alpha(const PhiTable& table, std::size_t max_elements) {
  require_side_size(table, max_elements);
  double worst = std::numeric_limits<double>::infinity();
  Measurement out;
  out.value = 0.0;
  for (bool slots : {true, false}) {
    Channel ch{&table, slots, 0};
    const std::uint32_t full = (1u << ch.size()) - 1;
    for (std::uint32_t other = 0; other < (1u << ch.other_size()); ++other) {
      ch.other = other;
      for (std::uint32_t i = 0; i < ch.size(); ++i) {
        const std::uint32_t bit = 1u << i;
        const std::uint32_t without = full & ~bit;
        // A = S \ {i}; T = A + Omega ranges over supersets of A without i.
        for (std::uint32_t a = without;; a = (a - 1) & without) {
          const double base_gain = ch.f(a | bit) - ch.f(a);
          if (base_gain > kGainFloor) {
            const std::uint32_t free = without & ~a;
            for (std::uint32_t extra = free;; extra = (extra - 1) & free) {
              const std::uint32_t t = a | extra;
              worst = std::min(worst, (ch.f(t | bit) - ch.f(t)) / base_gain);
              ++out.cases;
              if (extra == 0) break;
            }
          }
          if (a == 0) break;
        }
      }
    }
  }
  if (out.cases > 0) {
    out.defined = true;
    out.value = std::clamp(1.0 - worst, 0.0, 1.0);
  }
  return out;
}

double approximation_bound(double gamma, double alpha) {
  if (alpha < 1e-12) return gamma;
  return -std::expm1(-gamma * alpha) / alpha;
}

std::optional<ViolationWitness> find_violation(const PhiTable& table) {
  const std::uint32_t slot_full = (1u << table.slot_count()) - 1;
  const std::uint32_t seed_full = (1u << table.seed_count()) - 1;
  for (std::uint32_t big_s = 0; big_s <= slot_full; ++big_s) {
    for (std::uint32_t big_n = 0; big_n <= seed_full; ++big_n) {
      for (std::uint32_t s = big_s;; s = (s - 1) & big_s) {
        for (std::uint32_t n = big_n;; n = (n - 1) & big_n) {
          auto check = [&](Candidate e, double small_gain, double large_gain)
              -> std::optional<ViolationWitness> {
            if (large_gain > small_gain + kViolationTolerance) {
              return ViolationWitness{slot_list(s), slot_list(big_s), seed_list(n),
                                      seed_list(big_n), e, small_gain, large_gain, 0};
            }
            return std::nullopt;
          };
          for (std::uint32_t i = 0; i < table.slot_count(); ++i) {
            const std::uint32_t bit = 1u << i;
            if (big_s & bit) continue;
            if (auto w = check(Candidate::slot(i), table.at(s | bit, n) - table.at(s, n),
                               table.at(big_s | bit, big_n) - table.at(big_s, big_n))) {
              return w;
            }
          }
          for (std::uint32_t j = 0; j < table.seed_count(); ++j) {
            const std::uint32_t bit = 1u << j;
            if (big_n & bit) continue;
            if (auto w = check(Candidate::seed(j), table.at(s, n | bit) - table.at(s, n),
                               table.at(big_s, big_n | bit) - table.at(big_s, big_n))) {
              return w;
            }
          }
          if (n == 0) break;
        }
        if (s == 0) break;
      }
    }
  }
  return std::nullopt;
}

bool reverify_witness(const CombinedModel& model, const ViolationWitness& w) {
  auto gain = [&](std::vector<SlotIndex> slots, std::vector<NodeId> seeds) {
    const double before = model.phi(slots, seeds).phi;
    if (w.element.is_slot()) {
      slots.push_back(w.element.index);
    } else {
      seeds.push_back(w.element.index);
    }
    return model.phi(slots, seeds).phi - before;
  };
  const double small = gain(w.small_slots, w.small_seeds);
  const double large = gain(w.large_slots, w.large_seeds);
  return large > small + kViolationTolerance;
}

StructureReport make_structure_report(const PhiTable& table, std::size_t max_elements) {
  StructureReport r;
  const auto g = measure_gamma(table, max_elements);
  const auto a = measure_alpha(table, max_elements);
  r.gamma = g.value;
  r.gamma_defined = g.defined;
  r.alpha = a.value;
  r.alpha_defined = a.defined;
  r.bound = approximation_bound(r.gamma, r.alpha);
  r.violation_witness = find_violation(table);
  return r;
}

std::string to_json(const StructureReport& report, const ProblemInstance& instance) {
  nlohmann::json j;
  j["gamma"] = report.gamma;
  j["gamma_defined"] = report.gamma_defined;
  j["alpha"] = report.alpha;
  j["alpha_defined"] = report.alpha_defined;
  j["bound"] = report.bound;
  j["slots"] = instance.slot_count();
  j["nodes"] = instance.node_count();
  if (const auto& w = report.violation_witness) {
    auto slot_ids = [&](const std::vector<SlotIndex>& xs) {
      std::vector<std::int64_t> out;
      for (auto x : xs) out.push_back(instance.slots().slots[x].id.value);
      return out;
    };
    auto user_ids = [&](const std::vector<NodeId>& xs) {
      std::vector<std::int64_t> out;
      for (auto x : xs) out.push_back(instance.graph().user(x).value);
      return out;
    };
    nlohmann::json wj;
    wj["small_slots"] = slot_ids(w->small_slots);
    wj["small_seeds"] = user_ids(w->small_seeds);
    wj["large_slots"] = slot_ids(w->large_slots);
    wj["large_seeds"] = user_ids(w->large_seeds);
    wj["element_kind"] = w->element.is_slot() ? "slot" : "seed";
    wj["element_id"] = w->element.is_slot()
                           ? instance.slots().slots[w->element.index].id.value
                           : instance.graph().user(w->element.index).value;
    wj["small_gain"] = w->small_gain;
    wj["large_gain"] = w->large_gain;
    j["violation_witness"] = wj;
  } else {
    j["violation_witness"] = nullptr;
  }
  return j.dump(2);
}

ProblemInstance violation_search_instance(const ViolationSearchConfig& config,
                                          std::uint64_t instance_seed) {
  SmallInstanceParams p;
  p.slots = config.max_slots;
  p.nodes = config.max_nodes;
  p.edges = config.max_edges;
  return random_small_instance(p, instance_seed);
}

ViolationSearchResult find_bisubmodularity_violation(const ViolationSearchConfig& config,
                                                     std::uint64_t rng_seed) {
  ViolationSearchResult out;
  for (std::size_t i = 0; i < config.instances; ++i) {
    const std::uint64_t seed = splitmix64(rng_seed + i);
    const auto instance = violation_search_instance(config, seed);
    const CombinedModel model(instance, EvalMode::exact(), config.terms);
    const PhiTable table(model);
    ++out.instances_searched;
    if (auto w = find_violation(table); w && reverify_witness(model, *w)) {
      w->instance_seed = seed;
      out.witness = std::move(w);
      return out;
    }
  }
  return out;
}

BoundCheck verify_bound(const Solution& solution, const StructureReport& report,
                        const OracleSolution& oracle) {
  if (!solution.exact) throw ConfigError("bound check needs an exact-mode solution");
  BoundCheck out;
  out.margin = solution.phi.phi - report.bound * oracle.phi_opt;
  out.ok = out.margin >= -1e-9;
  return out;
}

}  // namespace splitmax

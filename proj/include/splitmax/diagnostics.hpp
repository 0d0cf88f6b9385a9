#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "splitmax/combined.hpp"
#include "splitmax/optimizers.hpp"

namespace splitmax {

inline constexpr std::size_t kMaxBruteForceElements = 16;

// Exact Phi for every (slot subset, seed subset) pair of a small instance,
// indexed by bitmask. Built once; every diagnostic below is a table lookup.
class PhiTable {
 public:
  // Requires exact mode and slots + nodes <= max_elements.
  explicit PhiTable(const CombinedModel& model,
                    std::size_t max_elements = kMaxBruteForceElements);

  std::size_t slot_count() const { return slot_count_; }
  std::size_t seed_count() const { return seed_count_; }
  double at(std::uint32_t slot_mask, std::uint32_t seed_mask) const {
    return values_[(static_cast<std::size_t>(seed_mask) << slot_count_) | slot_mask];
  }
  Money cost(std::uint32_t slot_mask, std::uint32_t seed_mask) const;
  const CombinedModel& model() const { return *model_; }

 private:
  const CombinedModel* model_;
  std::size_t slot_count_;
  std::size_t seed_count_;
  std::vector<double> values_;
  std::vector<Money> slot_costs_;
  std::vector<Money> seed_costs_;
};

struct OracleSolution {
  std::vector<SlotIndex> best_slots;
  std::vector<NodeId> best_seeds;
  double phi_opt = 0.0;
  std::size_t enumerated_count = 0;  // feasible pairs examined
};

// Exhaustive argmax of Phi over budget-feasible pairs; ties go to the
// lexicographically smallest (slot ids, user ids).
OracleSolution brute_force_optimum(const PhiTable& table, Money budget);
OracleSolution brute_force_optimum(const CombinedModel& model, Money budget);

struct Measurement {
  double value = 1.0;
  bool defined = false;      // false when no case had a positive denominator
  std::size_t cases = 0;     // cases with a positive denominator
};

// Bisubmodularity ratio: min over (q, Omega, N) and (S, N, Omega') of
// summed singleton gains over the joint gain, clamped to (0, 1].
Measurement measure_gamma(const PhiTable& table, std::size_t max_elements = 10);

// Generalized curvature: 1 - min over cases of gain(i | (S\i) + Omega) /
// gain(i | S\i), per channel, clamped to [0, 1].
Measurement measure_alpha(const PhiTable& table, std::size_t max_elements = 10);

// (1/alpha)(1 - exp(-gamma*alpha)); the alpha -> 0 limit is gamma.
double approximation_bound(double gamma, double alpha);

// A pair (A, B) <= (A', B') and element e outside the larger pair with
// gain(e | A', B') > gain(e | A, B).
struct ViolationWitness {
  std::vector<SlotIndex> small_slots;
  std::vector<SlotIndex> large_slots;
  std::vector<NodeId> small_seeds;
  std::vector<NodeId> large_seeds;
  Candidate element;
  double small_gain = 0.0;
  double large_gain = 0.0;
  std::uint64_t instance_seed = 0;
};

inline constexpr double kViolationTolerance = 1e-9;

std::optional<ViolationWitness> find_violation(const PhiTable& table);

// Recomputes both gains with CombinedModel::phi and checks the violation.
bool reverify_witness(const CombinedModel& model, const ViolationWitness& witness);

struct StructureReport {
  double gamma = 1.0;
  double alpha = 0.0;
  double bound = 1.0;
  bool gamma_defined = false;
  bool alpha_defined = false;
  std::optional<ViolationWitness> violation_witness;
};

StructureReport make_structure_report(const PhiTable& table,
                                      std::size_t max_elements = 10);
std::string to_json(const StructureReport& report, const ProblemInstance& instance);

struct ViolationSearchConfig {
  std::size_t instances = 1000;
  std::size_t max_slots = 4;
  std::size_t max_nodes = 4;
  std::size_t max_edges = 6;
  ObjectiveTerms terms;
};

struct ViolationSearchResult {
  std::optional<ViolationWitness> witness;
  std::size_t instances_searched = 0;
};

// Random small instances, each searched exhaustively; stops at the first
// witness. The witness records the instance seed so it can be rebuilt with
// violation_search_instance().
ViolationSearchResult find_bisubmodularity_violation(
    const ViolationSearchConfig& config, std::uint64_t rng_seed);
ProblemInstance violation_search_instance(const ViolationSearchConfig& config,
                                          std::uint64_t instance_seed);

struct BoundCheck {
  bool ok = false;
  double margin = 0.0;  // phi - bound * phi_opt
};

// Throws ConfigError when the solution was not evaluated in exact mode.
BoundCheck verify_bound(const Solution& solution, const StructureReport& report,
                        const OracleSolution& oracle);

}  // namespace splitmax

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "splitmax/billboard.hpp"
#include "splitmax/diffusion.hpp"
#include "splitmax/instance.hpp"

namespace splitmax {

struct EvalMode {
  enum class Kind { kMonteCarlo, kExact };

  Kind kind = Kind::kMonteCarlo;
  std::size_t simulations = 1000;
  std::uint64_t rng_seed = 0;

  static EvalMode monte_carlo(std::size_t simulations, std::uint64_t rng_seed) {
    return {Kind::kMonteCarlo, simulations, rng_seed};
  }
  static EvalMode exact() { return {Kind::kExact, 0, 0}; }
  bool is_exact() const { return kind == Kind::kExact; }
};

inline constexpr std::size_t kMaxExactSlots = 12;

// Which terms of the objective are switched on. Disabling terms is for
// diagnostics; optimizers always run with all three.
struct ObjectiveTerms {
  bool billboard = true;
  bool social = true;
  bool interaction = true;
};

struct ObjectiveValue {
  double phi = 0.0;
  double billboard = 0.0;
  double social = 0.0;
  double interaction = 0.0;
  double std_error = 0.0;
};

enum class CandidateKind : std::uint8_t { kSlot, kSeed };

struct Candidate {
  CandidateKind kind = CandidateKind::kSlot;
  std::uint32_t index = 0;  // SlotIndex or NodeId

  static Candidate slot(SlotIndex s) { return {CandidateKind::kSlot, s}; }
  static Candidate seed(NodeId n) { return {CandidateKind::kSeed, n}; }
  bool is_slot() const { return kind == CandidateKind::kSlot; }
  friend auto operator<=>(const Candidate&, const Candidate&) = default;
};

struct Gain {
  double value = 0.0;
  double std_error = 0.0;
};

// Per-seed activation probabilities re-indexed into the user universe.
using UserActivation = std::vector<std::pair<UserIndex, double>>;

// Sum over users of [1 - prod_b (1 - Pr(b,u))] * [1 - prod_v (1 - Pr(u,v))],
// one activation map per seed.
double interaction_effect(const SlotUserMatrix& matrix,
                          std::span<const SlotIndex> slots,
                          std::span<const UserActivation* const> seed_activation);

class SelectionState;

// Phi(S, N) = I(S) + I_G(N) + Psi(S, N) over one instance. Evaluation is
// const and thread-safe; activation maps are cached on first use.
class CombinedModel {
 public:
  // Throws ConfigError when exact mode is requested for a graph with more
  // than kMaxExactEdges edges or more than kMaxExactSlots slots.
  CombinedModel(const ProblemInstance& instance, EvalMode mode,
                ObjectiveTerms terms = {});
  ~CombinedModel();
  CombinedModel(const CombinedModel&) = delete;
  CombinedModel& operator=(const CombinedModel&) = delete;

  const ProblemInstance& instance() const { return *instance_; }
  const EvalMode& mode() const { return mode_; }
  const ObjectiveTerms& terms() const { return terms_; }
  const SpreadEngine& engine() const { return *engine_; }

  ObjectiveValue phi(std::span<const SlotIndex> slots,
                     std::span<const NodeId> seeds) const;

  double interaction(std::span<const SlotIndex> slots,
                     std::span<const NodeId> seeds) const;

  // Phi with the candidate minus Phi without, evaluated directly. Monte
  // Carlo spreads on both sides share their random streams. Throws
  // std::invalid_argument if the candidate is already selected.
  Gain marginal_phi(std::span<const SlotIndex> slots, std::span<const NodeId> seeds,
                    Candidate candidate) const;

  Money cost(Candidate c) const;
  const UserActivation& activation(NodeId seed) const;
  SpreadEstimate social_spread(std::span<const NodeId> seeds) const;

  SelectionState start() const;

 private:
  const ProblemInstance* instance_;
  EvalMode mode_;
  ObjectiveTerms terms_;
  std::unique_ptr<SpreadEngine> engine_;
  mutable std::mutex activation_mutex_;
  mutable std::vector<std::unique_ptr<UserActivation>> activation_;
};

// Incremental evaluation of Phi for a growing (S, N): per-user billboard
// and social survival products plus a spread cursor.
class SelectionState {
 public:
  explicit SelectionState(const CombinedModel& model);
  SelectionState(const SelectionState& other);
  SelectionState& operator=(const SelectionState& other);
  SelectionState(SelectionState&&) noexcept = default;
  SelectionState& operator=(SelectionState&&) noexcept = default;

  Gain gain(Candidate c) const;

  // Bound on gain(c) that stays valid for every later superset (S', N').
  // Billboard survival only shrinks and social coverage is at most 1;
  // the spread term is submodular.
  double gain_bound(Candidate c) const;
  // gain(c), also storing gain_bound(c) without a second spread evaluation.
  Gain gain(Candidate c, double& bound) const;

  void add(Candidate c);
  bool contains(Candidate c) const;

  ObjectiveValue value() const;
  std::span<const SlotIndex> slots() const { return slots_; }
  std::span<const NodeId> seeds() const { return seeds_; }
  Money spent_billboard() const { return spent_billboard_; }
  Money spent_social() const { return spent_social_; }

 private:
  const CombinedModel* model_;
  std::vector<double> bill_survival_;
  std::vector<double> soc_survival_;
  std::unique_ptr<SpreadCursor> social_;
  std::vector<SlotIndex> slots_;
  std::vector<NodeId> seeds_;
  std::vector<bool> slot_chosen_;
  std::vector<bool> seed_chosen_;
  Money spent_billboard_ = 0.0;
  Money spent_social_ = 0.0;
};

}  // namespace splitmax

#include "splitmax/combined.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace splitmax {

double interaction_effect(const SlotUserMatrix& matrix,
                          std::span<const SlotIndex> slots,
                          std::span<const UserActivation* const> seed_activation) {
  if (slots.empty() || seed_activation.empty()) return 0.0;
  std::vector<double> bill(matrix.user_count(), 1.0);
  std::vector<double> soc(matrix.user_count(), 1.0);
  for (SlotIndex s : slots) {
    for (const auto& e : matrix.row(s)) bill[e.user] *= 1.0 - e.prob;
  }
  for (const auto* act : seed_activation) {
    for (const auto& [u, p] : *act) soc.at(u) *= 1.0 - p;
  }
  double total = 0.0;
  for (std::size_t u = 0; u < bill.size(); ++u) total += (1.0 - bill[u]) * (1.0 - soc[u]);
  return total;
}

namespace {

template <class T>
std::vector<T> unique_sorted(std::span<const T> xs) {
  std::vector<T> out(xs.begin(), xs.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

CombinedModel::CombinedModel(const ProblemInstance& instance, EvalMode mode,
                             ObjectiveTerms terms)
    : instance_(&instance),
      mode_(mode),
      terms_(terms),
      activation_(instance.node_count()) {
  if (mode.is_exact()) {
    if (instance.slot_count() > kMaxExactSlots) {
      throw ConfigError("exact evaluation supports at most " +
                        std::to_string(kMaxExactSlots) + " slots, instance has " +
                        std::to_string(instance.slot_count()));
    }
    engine_ = make_exact_engine(instance.graph());
  } else {
    engine_ = make_monte_carlo_engine(instance.graph(), mode.simulations, mode.rng_seed);
  }
}

CombinedModel::~CombinedModel() = default;

const UserActivation& CombinedModel::activation(NodeId seed) const {
  if (seed >= instance_->node_count()) throw std::out_of_range("seed not in graph");
  {
    std::lock_guard lock(activation_mutex_);
    if (activation_[seed]) return *activation_[seed];
  }
  const auto map = engine_->activation(seed);
  auto act = std::make_unique<UserActivation>();
  act->reserve(map->size());
  for (const auto& [node, p] : *map) act->emplace_back(instance_->node_user(node), p);
  std::lock_guard lock(activation_mutex_);
  if (!activation_[seed]) activation_[seed] = std::move(act);
  return *activation_[seed];
}

SpreadEstimate CombinedModel::social_spread(std::span<const NodeId> seeds) const {
  return engine_->spread(seeds);
}

double CombinedModel::interaction(std::span<const SlotIndex> slots,
                                  std::span<const NodeId> seeds) const {
  const auto n = unique_sorted(seeds);
  std::vector<const UserActivation*> acts;
  acts.reserve(n.size());
  for (NodeId v : n) acts.push_back(&activation(v));
  return interaction_effect(instance_->matrix(), slots, acts);
}

ObjectiveValue CombinedModel::phi(std::span<const SlotIndex> slots,
                                  std::span<const NodeId> seeds) const {
  const auto s = unique_sorted(slots);
  const auto n = unique_sorted(seeds);
  for (SlotIndex x : s) {
    if (x >= instance_->slot_count()) throw std::out_of_range("slot not in instance");
  }
  ObjectiveValue out;
  if (terms_.billboard) out.billboard = influence(instance_->matrix(), s);
  if (terms_.social) {
    const auto est = engine_->spread(n);
    out.social = est.mean;
    out.std_error = est.std_error;
  }
  if (terms_.interaction) out.interaction = interaction(s, n);
  out.phi = out.billboard + out.social + out.interaction;
  return out;
}

Gain CombinedModel::marginal_phi(std::span<const SlotIndex> slots,
                                 std::span<const NodeId> seeds,
                                 Candidate candidate) const {
  std::vector<SlotIndex> s(slots.begin(), slots.end());
  std::vector<NodeId> n(seeds.begin(), seeds.end());
  Gain out;
  if (candidate.is_slot()) {
    if (std::find(s.begin(), s.end(), candidate.index) != s.end()) {
      throw std::invalid_argument("marginal_phi: slot already selected");
    }
    const double before = phi(s, n).phi;
    s.push_back(candidate.index);
    out.value = phi(s, n).phi - before;
  } else {
    if (std::find(n.begin(), n.end(), candidate.index) != n.end()) {
      throw std::invalid_argument("marginal_phi: seed already selected");
    }
    const double before = phi(s, n).phi;
    n.push_back(candidate.index);
    out.value = phi(s, n).phi - before;
    if (!mode_.is_exact() && terms_.social) {
      // Paired standard error of the spread difference.
      auto cursor = engine_->cursor();
      for (NodeId v : unique_sorted(seeds)) cursor->add(v);
      out.std_error = cursor->gain(candidate.index).std_error;
    }
  }
  return out;
}

Money CombinedModel::cost(Candidate c) const {
  return c.is_slot() ? instance_->slot_cost(c.index) : instance_->seed_cost(c.index);
}

SelectionState CombinedModel::start() const { return SelectionState(*this); }

SelectionState::SelectionState(const CombinedModel& model)
    : model_(&model),
      bill_survival_(model.instance().universe().size(), 1.0),
      soc_survival_(model.instance().universe().size(), 1.0),
      social_(model.engine().cursor()),
      slot_chosen_(model.instance().slot_count(), false),
      seed_chosen_(model.instance().node_count(), false) {}

SelectionState::SelectionState(const SelectionState& other)
    : model_(other.model_),
      bill_survival_(other.bill_survival_),
      soc_survival_(other.soc_survival_),
      social_(other.social_->clone()),
      slots_(other.slots_),
      seeds_(other.seeds_),
      slot_chosen_(other.slot_chosen_),
      seed_chosen_(other.seed_chosen_),
      spent_billboard_(other.spent_billboard_),
      spent_social_(other.spent_social_) {}

SelectionState& SelectionState::operator=(const SelectionState& other) {
  if (this != &other) *this = SelectionState(other);
  return *this;
}

bool SelectionState::contains(Candidate c) const {
  return c.is_slot() ? slot_chosen_.at(c.index) : seed_chosen_.at(c.index);
}

Gain SelectionState::gain(Candidate c) const {
  if (contains(c)) return {};
  const auto& terms = model_->terms();
  const double cb = terms.billboard ? 1.0 : 0.0;
  const double ci = terms.interaction ? 1.0 : 0.0;
  Gain out;
  if (c.is_slot()) {
    for (const auto& e : model_->instance().matrix().row(c.index)) {
      const double hit = bill_survival_[e.user] * e.prob;
      out.value += hit * (cb + ci * (1.0 - soc_survival_[e.user]));
    }
    return out;
  }
  if (terms.social) {
    const auto g = social_->gain(c.index);
    out.value = g.mean;
    out.std_error = g.std_error;
  }
  if (terms.interaction) {
    double psi = 0.0;
    for (const auto& [u, p] : model_->activation(c.index)) {
      psi += (1.0 - bill_survival_[u]) * soc_survival_[u] * p;
    }
    out.value += psi;
  }
  return out;
}

double SelectionState::gain_bound(Candidate c) const {
  if (contains(c)) return 0.0;
  const auto& terms = model_->terms();
  const double cb = terms.billboard ? 1.0 : 0.0;
  const double ci = terms.interaction ? 1.0 : 0.0;
  double bound = 0.0;
  if (c.is_slot()) {
    for (const auto& e : model_->instance().matrix().row(c.index)) {
      bound += bill_survival_[e.user] * e.prob * (cb + ci);
    }
    return bound;
  }
  if (terms.social) bound = social_->gain(c.index).mean;
  if (terms.interaction) {
    for (const auto& [u, p] : model_->activation(c.index)) bound += soc_survival_[u] * p;
  }
  return bound;
}

Gain SelectionState::gain(Candidate c, double& bound) const {
  bound = 0.0;
  if (contains(c)) return {};
  if (c.is_slot()) {
    bound = gain_bound(c);
    return gain(c);
  }
  const auto& terms = model_->terms();
  Gain out;
  if (terms.social) {
    const auto g = social_->gain(c.index);
    out.value = bound = g.mean;
    out.std_error = g.std_error;
  }
  if (terms.interaction) {
    double psi = 0.0;
    double cap = 0.0;
    for (const auto& [u, p] : model_->activation(c.index)) {
      psi += (1.0 - bill_survival_[u]) * soc_survival_[u] * p;
      cap += soc_survival_[u] * p;
    }
    out.value += psi;
    bound += cap;
  }
  return out;
}

void SelectionState::add(Candidate c) {
  if (contains(c)) throw std::invalid_argument("SelectionState: already selected");
  if (c.is_slot()) {
    for (const auto& e : model_->instance().matrix().row(c.index)) {
      bill_survival_[e.user] *= 1.0 - e.prob;
    }
    slot_chosen_[c.index] = true;
    slots_.push_back(c.index);
    spent_billboard_ += model_->cost(c);
  } else {
    for (const auto& [u, p] : model_->activation(c.index)) soc_survival_[u] *= 1.0 - p;
    social_->add(c.index);
    seed_chosen_[c.index] = true;
    seeds_.push_back(c.index);
    spent_social_ += model_->cost(c);
  }
}

ObjectiveValue SelectionState::value() const {
  const auto& terms = model_->terms();
  ObjectiveValue out;
  for (std::size_t u = 0; u < bill_survival_.size(); ++u) {
    if (terms.billboard) out.billboard += 1.0 - bill_survival_[u];
    if (terms.interaction) {
      out.interaction += (1.0 - bill_survival_[u]) * (1.0 - soc_survival_[u]);
    }
  }
  if (terms.social) {
    const auto v = social_->value();
    out.social = v.mean;
    out.std_error = v.std_error;
  }
  out.phi = out.billboard + out.social + out.interaction;
  return out;
}

}  // namespace splitmax

#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "splitmax/types.hpp"

namespace splitmax {

struct SlotEntry {
  UserIndex user = 0;
  double prob = 0.0;

  friend bool operator==(const SlotEntry&, const SlotEntry&) = default;
};

// Sparse slot x user influence probabilities. Each row is sorted by user and
// holds only pairs that match in space and time.
class SlotUserMatrix {
 public:
  SlotUserMatrix() = default;
  SlotUserMatrix(std::size_t slot_count, std::size_t user_count);

  // Rows given directly; used by tests and small hand-built instances.
  // Duplicate users within a row or probabilities outside (0,1] throw.
  SlotUserMatrix(std::vector<std::vector<SlotEntry>> rows,
                 std::size_t user_count);

  std::size_t slot_count() const { return rows_.size(); }
  std::size_t user_count() const { return user_count_; }
  std::size_t entry_count() const;

  std::span<const SlotEntry> row(SlotIndex slot) const { return rows_.at(slot); }

  friend bool operator==(const SlotUserMatrix&, const SlotUserMatrix&) = default;

 private:
  std::vector<std::vector<SlotEntry>> rows_;
  std::size_t user_count_ = 0;
};

// Matches every trajectory record against every slot: an entry exists when
// the record lies within `lambda` meters of the slot's billboard and its
// interval overlaps the slot's. The entry value is the billboard's panel
// size over the largest panel among `billboards`.
SlotUserMatrix build_matrix(const TrajectoryDB& db,
                            std::span<const Billboard> billboards,
                            const SlotSet& slots, double lambda,
                            const UserUniverse& universe);

// Sum over users of 1 - prod_{b in slots} (1 - Pr(b, u)).
double influence(const SlotUserMatrix& matrix, std::span<const SlotIndex> slots);

// influence(slots + {candidate}) - influence(slots), from survival products.
// Throws std::invalid_argument when candidate is already in `slots`.
double marginal_influence(const SlotUserMatrix& matrix,
                          std::span<const SlotIndex> slots, SlotIndex candidate);

// Per-user survival products prod (1 - Pr(b,u)) for a growing slot set.
class CoverageState {
 public:
  explicit CoverageState(const SlotUserMatrix& matrix);

  double gain(SlotIndex slot) const;
  void add(SlotIndex slot);

  double value() const;
  double survival(UserIndex user) const { return survival_[user]; }
  std::span<const double> survival() const { return survival_; }
  std::span<const SlotIndex> slots() const { return slots_; }
  bool contains(SlotIndex slot) const { return chosen_[slot]; }

 private:
  const SlotUserMatrix* matrix_;
  std::vector<double> survival_;
  std::vector<SlotIndex> slots_;
  std::vector<bool> chosen_;
};

// Debug dump: `slot_id,user_id,prob`.
void write_matrix_csv(std::ostream& out, const SlotUserMatrix& matrix,
                      const SlotSet& slots, const UserUniverse& universe);

}  // namespace splitmax

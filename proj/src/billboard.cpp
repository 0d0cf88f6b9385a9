#include "splitmax/billboard.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace splitmax {

SlotUserMatrix::SlotUserMatrix(std::size_t slot_count, std::size_t user_count)
    : rows_(slot_count), user_count_(user_count) {}

SlotUserMatrix::SlotUserMatrix(std::vector<std::vector<SlotEntry>> rows,
                               std::size_t user_count)
    : rows_(std::move(rows)), user_count_(user_count) {
  for (auto& row : rows_) {
    std::sort(row.begin(), row.end(),
              [](const SlotEntry& a, const SlotEntry& b) { return a.user < b.user; });
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].user >= user_count_) {
        throw std::invalid_argument("matrix: user index out of range");
      }
      if (!(row[i].prob > 0.0 && row[i].prob <= 1.0)) {
        throw std::invalid_argument("matrix: probability outside (0,1]");
      }
      if (i > 0 && row[i].user == row[i - 1].user) {
        throw std::invalid_argument("matrix: duplicate user in slot row");
      }
    }
  }
}

std::size_t SlotUserMatrix::entry_count() const {
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.size();
  return total;
}

namespace {

// Degrees of latitude spanned by `meters`, with slack.
double lat_window(double meters, CoordinateSystem coords) {
  if (coords == CoordinateSystem::kPlanar) return meters;
  return meters / 111000.0 * 1.01 + 1e-9;
}

}  // namespace

SlotUserMatrix build_matrix(const TrajectoryDB& db,
                            std::span<const Billboard> billboards,
                            const SlotSet& slots, double lambda,
                            const UserUniverse& universe) {
  if (!(lambda > 0.0)) throw std::invalid_argument("build_matrix: lambda must be > 0");

  double max_size = 0.0;
  std::unordered_map<BillboardId, std::size_t> board_index;
  for (std::size_t i = 0; i < billboards.size(); ++i) {
    max_size = std::max(max_size, billboards[i].panel_size);
    board_index.emplace(billboards[i].id, i);
  }

  // Slots of each billboard sorted by start time.
  std::vector<std::vector<SlotIndex>> board_slots(billboards.size());
  for (SlotIndex s = 0; s < slots.size(); ++s) {
    auto it = board_index.find(slots.slots[s].billboard);
    if (it == board_index.end()) {
      throw DataError("slot " + std::to_string(slots.slots[s].id.value) +
                      " references unknown billboard " +
                      std::to_string(slots.slots[s].billboard.value));
    }
    board_slots[it->second].push_back(s);
  }
  std::vector<bool> ends_sorted(billboards.size(), true);
  for (std::size_t b = 0; b < billboards.size(); ++b) {
    auto& list = board_slots[b];
    std::sort(list.begin(), list.end(), [&](SlotIndex x, SlotIndex y) {
      return slots.slots[x].interval.start < slots.slots[y].interval.start;
    });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (slots.slots[list[i]].interval.end < slots.slots[list[i - 1]].interval.end) {
        ends_sorted[b] = false;
      }
    }
  }

  // Records ordered by latitude for a window search around each billboard.
  std::vector<std::size_t> by_lat(db.records.size());
  for (std::size_t i = 0; i < by_lat.size(); ++i) by_lat[i] = i;
  std::sort(by_lat.begin(), by_lat.end(), [&](std::size_t a, std::size_t b) {
    return db.records[a].location.lat < db.records[b].location.lat;
  });
  std::vector<double> lats(by_lat.size());
  for (std::size_t i = 0; i < by_lat.size(); ++i) {
    lats[i] = db.records[by_lat[i]].location.lat;
  }

  std::vector<UserIndex> record_user(db.records.size());
  for (std::size_t i = 0; i < db.records.size(); ++i) {
    record_user[i] = universe.index_of(db.records[i].user);
  }

  std::vector<std::vector<UserIndex>> hits(slots.size());
  const double window = lat_window(lambda, db.coords);
  for (std::size_t b = 0; b < billboards.size(); ++b) {
    const auto& board = billboards[b];
    const auto& list = board_slots[b];
    if (list.empty()) continue;
    auto lo = std::lower_bound(lats.begin(), lats.end(), board.location.lat - window);
    auto hi = std::upper_bound(lats.begin(), lats.end(), board.location.lat + window);
    for (auto it = lo; it != hi; ++it) {
      const std::size_t r = by_lat[static_cast<std::size_t>(it - lats.begin())];
      const auto& rec = db.records[r];
      if (distance_meters(rec.location, board.location, db.coords) > lambda) continue;
      // Record [ts, te] meets slot [s, e) iff ts < e and te >= s.
      std::size_t first = 0;
      if (ends_sorted[b]) {
        first = static_cast<std::size_t>(
            std::upper_bound(list.begin(), list.end(), rec.interval.start,
                             [&](Timestamp t, SlotIndex s) {
                               return t < slots.slots[s].interval.end;
                             }) -
            list.begin());
      }
      for (std::size_t k = first; k < list.size(); ++k) {
        const auto& iv = slots.slots[list[k]].interval;
        if (iv.start > rec.interval.end) break;
        if (rec.interval.start < iv.end) hits[list[k]].push_back(record_user[r]);
      }
    }
  }

  std::vector<std::vector<SlotEntry>> rows(slots.size());
  for (SlotIndex s = 0; s < slots.size(); ++s) {
    auto& users = hits[s];
    std::sort(users.begin(), users.end());
    users.erase(std::unique(users.begin(), users.end()), users.end());
    if (users.empty()) continue;
    const double p =
        billboards[board_index.at(slots.slots[s].billboard)].panel_size / max_size;
    rows[s].reserve(users.size());
    for (UserIndex u : users) rows[s].push_back({u, p});
  }
  return SlotUserMatrix(std::move(rows), universe.size());
}

double influence(const SlotUserMatrix& matrix, std::span<const SlotIndex> slots) {
  CoverageState state(matrix);
  for (SlotIndex s : slots) {
    if (!state.contains(s)) state.add(s);
  }
  return state.value();
}

double marginal_influence(const SlotUserMatrix& matrix,
                          std::span<const SlotIndex> slots, SlotIndex candidate) {
  CoverageState state(matrix);
  for (SlotIndex s : slots) {
    if (s == candidate) {
      throw std::invalid_argument("marginal_influence: candidate already selected");
    }
    if (!state.contains(s)) state.add(s);
  }
  return state.gain(candidate);
}

CoverageState::CoverageState(const SlotUserMatrix& matrix)
    : matrix_(&matrix),
      survival_(matrix.user_count(), 1.0),
      chosen_(matrix.slot_count(), false) {}

double CoverageState::gain(SlotIndex slot) const {
  double total = 0.0;
  for (const auto& e : matrix_->row(slot)) total += survival_[e.user] * e.prob;
  return total;
}

void CoverageState::add(SlotIndex slot) {
  if (chosen_.at(slot)) throw std::invalid_argument("CoverageState: slot already added");
  for (const auto& e : matrix_->row(slot)) survival_[e.user] *= 1.0 - e.prob;
  chosen_[slot] = true;
  slots_.push_back(slot);
}

double CoverageState::value() const {
  double total = 0.0;
  for (double s : survival_) total += 1.0 - s;
  return total;
}

void write_matrix_csv(std::ostream& out, const SlotUserMatrix& matrix,
                      const SlotSet& slots, const UserUniverse& universe) {
  out << "slot_id,user_id,prob\n";
  char buf[64];
  for (SlotIndex s = 0; s < matrix.slot_count(); ++s) {
    for (const auto& e : matrix.row(s)) {
      std::snprintf(buf, sizeof buf, "%.17g", e.prob);
      out << slots.slots[s].id.value << ',' << universe.id(e.user).value << ','
          << buf << '\n';
    }
  }
}

}  // namespace splitmax

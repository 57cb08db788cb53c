#pragma once

// Table-based decomposition. Each side gets a table of the decoded values it
// can reach after fault injection, with the sparsest witness bitmap for each;
// a weight w is then a pair (a, b) with a - b = w (exact) or a - b closest to
// w (closest value matching).

#include <hgc/compiled.hpp>
#include <hgc/core.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace hgc {

inline constexpr std::int64_t kDefaultTableBudget = std::int64_t{1} << 16;

struct SideEntry {
  Weight value = 0;          // decoded value after fault injection
  std::int64_t cell_sum = 0;  // minimal over assignments reaching value
  Bitmap witness;            // lexicographically smallest among the minimal ones
};

/// Reachable values of one side, ascending, with O(1) lookup by value.
class AchievableSide {
 public:
  AchievableSide(Weight min_value, Weight max_value, std::vector<SideEntry> entries)
      : min_value_(min_value), entries_(std::move(entries)) {
    slot_.assign(static_cast<std::size_t>(max_value - min_value + 1), -1);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      slot_[static_cast<std::size_t>(entries_[i].value - min_value_)] = static_cast<std::int32_t>(i);
    }
  }

  const std::vector<SideEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  const SideEntry* find(Weight value) const {
    const Weight idx = value - min_value_;
    if (idx < 0 || idx >= static_cast<Weight>(slot_.size())) return nullptr;
    const std::int32_t i = slot_[static_cast<std::size_t>(idx)];
    return i < 0 ? nullptr : &entries_[static_cast<std::size_t>(i)];
  }

 private:
  Weight min_value_;
  std::vector<SideEntry> entries_;
  std::vector<std::int32_t> slot_;
};

/// Number of raw assignments of one side, L^(c*r), saturating.
inline std::int64_t side_assignment_count(const GroupingConfig& config) {
  std::int64_t out = 1;
  for (int i = 0; i < config.cells_per_side(); ++i) {
    if (!detail::checked_mul(out, config.levels(), out)) return std::numeric_limits<std::int64_t>::max();
  }
  return out;
}

/// Per-significance composition. Within one significance only the net level
/// count t matters for the value, and the cheapest way to hold t is any split
/// with cell sum t; the lexicographically smallest split packs L-1 into the
/// last free rows. Across significances the state keeps, per partial value, the
/// lexicographically smallest level-count prefix of minimal sum.
inline AchievableSide achievable_values(const FaultMapSide& side, const GroupingConfig& config,
                                        std::int64_t budget = kDefaultTableBudget) {
  require_shape(side, config);
  if (side_assignment_count(config) > budget) {
    throw BudgetExceeded("side table needs L^(c*r) = " + std::to_string(side_assignment_count(config)) +
                         " assignments, budget is " + std::to_string(budget));
  }
  const int c = config.columns();
  const int r = config.rows();
  const CellValue top = config.max_cell();
  const Weight span = (config.significance(0) * config.levels() - 1) * r;

  struct State {
    std::int64_t sum = -1;  // -1: unreachable
    std::vector<std::int32_t> prefix;
  };
  std::vector<State> cur(static_cast<std::size_t>(span + 1));
  cur[0].sum = 0;
  for (int k = 0; k < c; ++k) {
    int free = 0;
    int sa0 = 0;
    for (int j = 0; j < r; ++j) {
      free += !side.stuck(k, j);
      sa0 += side.sa0(k, j);
    }
    const std::int64_t s = config.significance(k);
    std::vector<State> next(cur.size());
    for (std::size_t v = 0; v < cur.size(); ++v) {
      if (cur[v].sum < 0) continue;
      for (std::int32_t t = 0; t <= free * top; ++t) {
        const auto target = static_cast<std::size_t>(static_cast<Weight>(v) + s * (sa0 * top + t));
        const std::int64_t sum = cur[v].sum + t;
        State& slot = next[target];
        bool better = slot.sum < 0 || sum < slot.sum;
        if (!better && sum == slot.sum) {
          // same length prefixes; compare prefix then this level count
          auto cmp = std::lexicographical_compare_three_way(cur[v].prefix.begin(), cur[v].prefix.end(),
                                                            slot.prefix.begin(), slot.prefix.end() - 1);
          better = cmp < 0 || (cmp == 0 && t < slot.prefix.back());
        }
        if (better) {
          slot.sum = sum;
          slot.prefix = cur[v].prefix;
          slot.prefix.push_back(t);
        }
      }
    }
    cur.swap(next);
  }

  std::vector<SideEntry> entries;
  Weight lo = 0;
  Weight hi = 0;
  for (std::size_t v = 0; v < cur.size(); ++v) {
    if (cur[v].sum < 0) continue;
    Bitmap witness(config);
    for (int k = 0; k < c; ++k) {
      std::int32_t left = cur[v].prefix[static_cast<std::size_t>(k)];
      for (int j = r - 1; j >= 0 && left > 0; --j) {
        if (side.stuck(k, j)) continue;
        const std::int32_t put = std::min(left, top);
        witness.at(k, j) = put;
        left -= put;
      }
    }
    if (entries.empty()) lo = static_cast<Weight>(v);
    hi = static_cast<Weight>(v);
    entries.push_back({static_cast<Weight>(v), cur[v].sum, std::move(witness)});
  }
  return AchievableSide(lo, hi, std::move(entries));
}

/// Pairwise differences of the two sides' tables enumerate the representable set.
struct DecompositionTable {
  GroupingConfig config;
  std::shared_ptr<const AchievableSide> pos;
  std::shared_ptr<const AchievableSide> neg;
};

namespace detail {

// (cell sum, pos bitmap, neg bitmap) ordering used for every tie-break.
inline bool sparser(const SideEntry& a, const SideEntry& b, const SideEntry& best_a, const SideEntry& best_b) {
  const std::int64_t lhs = a.cell_sum + b.cell_sum;
  const std::int64_t rhs = best_a.cell_sum + best_b.cell_sum;
  if (lhs != rhs) return lhs < rhs;
  const auto pa = a.witness.flat();
  const auto pb = best_a.witness.flat();
  const auto cmp = std::lexicographical_compare_three_way(pa.begin(), pa.end(), pb.begin(), pb.end());
  if (cmp != 0) return cmp < 0;
  const auto na = b.witness.flat();
  const auto nb = best_b.witness.flat();
  return std::lexicographical_compare(na.begin(), na.end(), nb.begin(), nb.end());
}

inline CompiledWeight to_compiled(Weight w, const SideEntry& a, const SideEntry& b, SolvePath path) {
  const Weight realized = a.value - b.value;
  return CompiledWeight{a.witness, b.witness, realized, w - realized, path};
}

// Best pair among those with a - b in {w - d, w + d}.
inline std::optional<CompiledWeight> best_pair_at(Weight w, Weight d, const DecompositionTable& table,
                                                  SolvePath path) {
  const SideEntry* best_a = nullptr;
  const SideEntry* best_b = nullptr;
  for (const auto& a : table.pos->entries()) {
    for (Weight target : {w - d, w + d}) {
      const SideEntry* b = table.neg->find(a.value - target);
      if (b == nullptr) continue;
      if (best_a == nullptr || sparser(a, *b, *best_a, *best_b)) {
        best_a = &a;
        best_b = b;
      }
      if (d == 0) break;
    }
  }
  if (best_a == nullptr) return std::nullopt;
  return to_compiled(w, *best_a, *best_b, path);
}

}  // namespace detail

/// Sparsest exact pair, or nullopt when w is not representable.
inline std::optional<CompiledWeight> fawd_table_lookup(Weight w, const DecompositionTable& table) {
  return detail::best_pair_at(w, 0, table, SolvePath::TableFawd);
}

/// Closest pair. The minimal distance comes from one merge-style sweep over the
/// two ascending value lists; the tie-break then checks a - w +/- d per entry.
inline CompiledWeight cvm_table_lookup(Weight w, const DecompositionTable& table) {
  const auto& A = table.pos->entries();
  const auto& B = table.neg->entries();
  Weight best = std::numeric_limits<Weight>::max();
  std::size_t j = 0;
  for (const auto& a : A) {
    const Weight target = a.value - w;  // ideal b
    while (j + 1 < B.size() && B[j + 1].value <= target) ++j;
    for (std::size_t k = j; k < std::min(j + 2, B.size()); ++k) {
      const Weight diff = a.value - B[k].value - w;
      best = std::min(best, diff < 0 ? -diff : diff);
    }
  }
  auto out = detail::best_pair_at(w, best, table, SolvePath::TableCvm);
  if (!out) throw std::logic_error("CVM sweep found a distance with no pair");
  return *out;
}

/// Build-once cache of side tables keyed by layout and fault codes. Fault-free
/// sides dominate real fault maps, so most lookups hit the same few tables.
class TableCache {
 public:
  explicit TableCache(std::int64_t budget = kDefaultTableBudget) : budget_(budget) {}

  std::shared_ptr<const AchievableSide> side(const FaultMapSide& faults, const GroupingConfig& config) {
    std::string key = key_of(faults, config);
    std::shared_ptr<Slot> slot;
    {
      std::shared_lock lock(mutex_);
      if (auto it = slots_.find(key); it != slots_.end()) slot = it->second;
    }
    if (!slot) {
      std::unique_lock lock(mutex_);
      auto [it, inserted] = slots_.try_emplace(std::move(key), nullptr);
      if (inserted) it->second = std::make_shared<Slot>();
      slot = it->second;
    }
    std::call_once(slot->once, [&] {
      slot->table = std::make_shared<const AchievableSide>(achievable_values(faults, config, budget_));
      builds_.fetch_add(1, std::memory_order_relaxed);
    });
    return slot->table;
  }

  DecompositionTable table(const FaultMap& faults, const GroupingConfig& config) {
    return {config, side(faults.pos, config), side(faults.neg, config)};
  }

  std::size_t builds() const { return builds_.load(std::memory_order_relaxed); }

 private:
  struct Slot {
    std::once_flag once;
    std::shared_ptr<const AchievableSide> table;
  };

  static std::string key_of(const FaultMapSide& faults, const GroupingConfig& config) {
    std::string key;
    key.reserve(12 + faults.flat().size());
    for (int v : {config.columns(), config.rows(), config.levels()}) {
      key.append(reinterpret_cast<const char*>(&v), sizeof v);
    }
    for (CellFault f : faults.flat()) key.push_back(static_cast<char>(f));
    return key;
  }

  std::int64_t budget_;
  std::shared_mutex mutex_;
  std::unordered_map<std::string, std::shared_ptr<Slot>> slots_;
  std::atomic<std::size_t> builds_{0};
};

/// Uncached convenience for one fault map.
inline DecompositionTable build_table(const FaultMap& faults, const GroupingConfig& config,
                                      std::int64_t budget = kDefaultTableBudget) {
  return {config, std::make_shared<const AchievableSide>(achievable_values(faults.pos, config, budget)),
          std::make_shared<const AchievableSide>(achievable_values(faults.neg, config, budget))};
}

}  // namespace hgc

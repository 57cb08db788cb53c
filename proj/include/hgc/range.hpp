#pragma once

// Representable range of a faulty cell group (clipping), the cheap
// inconsecutivity trigger used for routing, and an exact enumeration of the
// representable set.

#include <hgc/core.hpp>

#include <cstdint>
#include <vector>

namespace hgc {

struct RangeInfo {
  Weight stuck_offset = 0;
  Weight max_value = 0;
  Weight min_value = 0;
  Weight ideal_max = 0;
  Weight ideal_min = 0;

  Weight width() const { return max_value - min_value; }
  Weight ideal_width() const { return ideal_max - ideal_min; }
  bool contains(Weight w) const { return w >= min_value && w <= max_value; }

  /// Fraction of the fault-free width lost to faults.
  double reduction() const {
    return static_cast<double>(ideal_width() - width()) / static_cast<double>(ideal_width());
  }
};

/// One significance position (counted from the LSB, 1-based) whose cells are
/// all stuck and whose gap stride exceeds what the lower positions can bridge.
struct TriggerEntry {
  int significance = 0;        // i: 1 = LSB, c = MSB
  std::int64_t gap_stride = 0;  // L^i
  std::int64_t tail_span = 0;   // r * (L^(i-1) - 1)
};

struct ConsecutivityReport {
  bool triggered = false;
  std::vector<TriggerEntry> entries;
};

inline constexpr std::int64_t kDefaultEnumerationBudget = std::int64_t{1} << 24;

namespace detail {

struct ColumnCounts {
  int pos_free = 0;
  int neg_free = 0;
  int pos_sa0 = 0;
  int neg_sa0 = 0;
};

inline ColumnCounts column_counts(const FaultMap& faults, int k, int rows) {
  ColumnCounts out;
  for (int j = 0; j < rows; ++j) {
    switch (faults.pos.at(k, j)) {
      case CellFault::Free: ++out.pos_free; break;
      case CellFault::SA0: ++out.pos_sa0; break;
      case CellFault::SA1: break;
    }
    switch (faults.neg.at(k, j)) {
      case CellFault::Free: ++out.neg_free; break;
      case CellFault::SA0: ++out.neg_sa0; break;
      case CellFault::SA1: break;
    }
  }
  return out;
}

// Largest decoded value of one side's free cells: every free cell at L-1.
inline Weight free_max(const FaultMapSide& side, const GroupingConfig& config) {
  Weight out = 0;
  for (int k = 0; k < config.columns(); ++k) {
    for (int j = 0; j < config.rows(); ++j) {
      if (!side.stuck(k, j)) out += config.significance(k) * config.max_cell();
    }
  }
  return out;
}

}  // namespace detail

/// (L-1) * (d(F0+) - d(F0-)): the part of the realized weight fixed by SA0 cells.
inline Weight stuck_offset(const FaultMap& faults, const GroupingConfig& config) {
  require_shape(faults, config);
  Weight out = 0;
  for (int k = 0; k < config.columns(); ++k) {
    for (int j = 0; j < config.rows(); ++j) {
      out += config.significance(k) * (static_cast<int>(faults.pos.sa0(k, j)) - static_cast<int>(faults.neg.sa0(k, j)));
    }
  }
  return out * config.max_cell();
}

/// The extremes are reached with one side's free cells all at L-1 and the
/// other side's free cells all at 0.
inline RangeInfo representable_range(const FaultMap& faults, const GroupingConfig& config) {
  RangeInfo out;
  out.stuck_offset = stuck_offset(faults, config);
  out.max_value = detail::free_max(faults.pos, config) + out.stuck_offset;
  out.min_value = -detail::free_max(faults.neg, config) + out.stuck_offset;
  out.ideal_max = config.ideal_max();
  out.ideal_min = config.ideal_min();
  return out;
}

/// Sufficient condition for a gap in the representable set. Position i
/// (1 = LSB) triggers when all 2r cells there are stuck on both sides, the
/// lower positions cannot bridge the stride (2 * tail_span + 1 < L^i), and at
/// least one free cell above i makes the upper part take two distinct values.
/// The MSB never triggers.
inline ConsecutivityReport inconsecutivity_trigger(const FaultMap& faults, const GroupingConfig& config) {
  require_shape(faults, config);
  const int c = config.columns();
  const int r = config.rows();
  ConsecutivityReport out;

  // free_above[k]: some free cell at a position more significant than k.
  std::vector<bool> free_above(static_cast<std::size_t>(c), false);
  bool seen_free = false;
  for (int k = 0; k < c; ++k) {
    free_above[static_cast<std::size_t>(k)] = seen_free;
    for (int j = 0; j < r; ++j) seen_free = seen_free || !faults.pos.stuck(k, j) || !faults.neg.stuck(k, j);
  }

  for (int i = 1; i < c; ++i) {
    const int k = c - i;
    bool all_stuck = true;
    for (int j = 0; j < r && all_stuck; ++j) all_stuck = faults.pos.stuck(k, j) && faults.neg.stuck(k, j);
    if (!all_stuck || !free_above[static_cast<std::size_t>(k)]) continue;

    const std::int64_t stride = config.significance(k) * config.levels();  // L^i
    const std::int64_t tail = static_cast<std::int64_t>(r) * (config.significance(k) - 1);
    if (2 * tail + 1 < stride) out.entries.push_back({i, stride, tail});
  }
  out.triggered = !out.entries.empty();
  return out;
}

/// Work units the exact enumeration performs: c compositions over a value
/// window of 2 * ideal_max + 1 with at most 2r(L-1) + 1 shifts each.
inline std::int64_t enumeration_cost(const GroupingConfig& config) {
  const std::int64_t window = 2 * config.ideal_max() + 1;
  const std::int64_t shifts = 2 * static_cast<std::int64_t>(config.rows()) * config.max_cell() + 1;
  std::int64_t cost = 0;
  if (!detail::checked_mul(window, shifts, cost) || !detail::checked_mul(cost, config.columns(), cost)) {
    return std::numeric_limits<std::int64_t>::max();
  }
  return cost;
}

/// Membership mask over [ideal_min, ideal_max] of the representable set.
/// Each significance contributes s_k * m for m in a contiguous range (the net
/// free level count pos - neg) plus its stuck SA0 offset; positions are
/// composed by Minkowski sums.
inline std::vector<char> representable_mask(const FaultMap& faults, const GroupingConfig& config,
                                            std::int64_t budget = kDefaultEnumerationBudget) {
  require_shape(faults, config);
  if (enumeration_cost(config) > budget) {
    throw BudgetExceeded("exact enumeration needs " + std::to_string(enumeration_cost(config)) +
                         " work units, budget is " + std::to_string(budget));
  }
  const Weight offset = config.ideal_max();
  const auto size = static_cast<std::size_t>(2 * offset + 1);
  const Weight L1 = config.max_cell();

  std::vector<char> cur(size, 0);
  std::vector<char> next(size, 0);
  cur[static_cast<std::size_t>(offset)] = 1;
  for (int k = 0; k < config.columns(); ++k) {
    const auto counts = detail::column_counts(faults, k, config.rows());
    const std::int64_t s = config.significance(k);
    const Weight base = s * L1 * (counts.pos_sa0 - counts.neg_sa0);
    const Weight lo = -static_cast<Weight>(counts.neg_free) * L1;
    const Weight hi = static_cast<Weight>(counts.pos_free) * L1;
    std::fill(next.begin(), next.end(), 0);
    for (std::size_t v = 0; v < size; ++v) {
      if (!cur[v]) continue;
      for (Weight m = lo; m <= hi; ++m) {
        const Weight target = static_cast<Weight>(v) + base + s * m;
        next[static_cast<std::size_t>(target)] = 1;
      }
    }
    cur.swap(next);
  }
  return cur;
}

/// All realizable weights for this fault map, ascending.
inline std::vector<Weight> enumerate_representable_set(const FaultMap& faults, const GroupingConfig& config,
                                                       std::int64_t budget = kDefaultEnumerationBudget) {
  const auto mask = representable_mask(faults, config, budget);
  std::vector<Weight> out;
  for (std::size_t v = 0; v < mask.size(); ++v) {
    if (mask[v]) out.push_back(static_cast<Weight>(v) - config.ideal_max());
  }
  return out;
}

/// True iff the representable set has no interior gaps.
inline bool is_consecutive_exact(const FaultMap& faults, const GroupingConfig& config,
                                 std::int64_t budget = kDefaultEnumerationBudget) {
  const auto mask = representable_mask(faults, config, budget);
  std::size_t first = 0;
  while (first < mask.size() && !mask[first]) ++first;
  std::size_t last = mask.size();
  while (last > first && !mask[last - 1]) --last;
  for (std::size_t v = first; v < last; ++v) {
    if (!mask[v]) return false;
  }
  return true;
}

}  // namespace hgc

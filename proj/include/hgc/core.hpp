#pragma once

// Grouping layout, bitmaps, fault maps and the decode / fault-injection
// functions everything else is built on.
//
// Matrix convention: a bitmap is c x r, significance-major. Index k runs over
// significance positions with k = 0 the MSB (significance L^(c-1)) and
// k = c-1 the LSB (significance 1); index j runs over the r grouped rows that
// share one input. Flat storage is k * r + j, which is also the on-disk order.
//
// Stuck-at polarity: SA0 pins a cell at L-1, SA1 pins it at 0. This follows the
// fault-injection algebra (1 - F0 - F1) (.) X + (L-1) F0 and is the opposite of
// what the resistance-state names suggest.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hgc {

using Weight = std::int64_t;
using CellValue = std::int32_t;

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

// a * b, or false on int64 overflow.
inline bool checked_mul(std::int64_t a, std::int64_t b, std::int64_t& out) {
  return !__builtin_mul_overflow(a, b, &out);
}

inline std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t out = 1;
  for (int i = 0; i < exp; ++i) {
    if (!checked_mul(out, base, out)) throw ConfigError("integer power overflows int64");
  }
  return out;
}

}  // namespace detail

/// Layout of one weight's cell group: `columns` significance positions, `rows`
/// grouped rows sharing an input, and `levels` programmable levels per cell.
class GroupingConfig {
 public:
  GroupingConfig(int columns, int rows, int levels) : columns_(columns), rows_(rows), levels_(levels) {
    if (columns < 1) throw ConfigError("columns must be >= 1");
    if (rows < 1) throw ConfigError("rows must be >= 1");
    if (levels < 2) throw ConfigError("levels must be >= 2");
    // Everything downstream works with values bounded by 2 * (L^c) * r, and the
    // enumeration code indexes offset arrays by those values.
    std::int64_t span = 0;
    try {
      span = detail::ipow(levels, columns);
    } catch (const ConfigError&) {
      throw ConfigError("L^c overflows int64");
    }
    if (!detail::checked_mul(span, rows, span) || !detail::checked_mul(span, 2, span)) {
      throw ConfigError("(L^c) * r overflows int64");
    }
    significance_.resize(static_cast<std::size_t>(columns));
    std::int64_t s = 1;
    for (int k = columns - 1; k >= 0; --k) {
      significance_[static_cast<std::size_t>(k)] = s;
      s *= levels;
    }
    ideal_max_ = (s - 1) * rows;
  }

  int columns() const { return columns_; }
  int rows() const { return rows_; }
  int levels() const { return levels_; }
  CellValue max_cell() const { return levels_ - 1; }

  /// [L^(c-1), ..., L, 1]
  const std::vector<std::int64_t>& significance() const { return significance_; }
  std::int64_t significance(int k) const { return significance_[static_cast<std::size_t>(k)]; }

  int cells_per_side() const { return columns_ * rows_; }
  int cells_per_weight() const { return 2 * columns_ * rows_; }

  /// Largest fault-free weight, (L^c - 1) * r.
  Weight ideal_max() const { return ideal_max_; }
  Weight ideal_min() const { return -ideal_max_; }
  Weight ideal_width() const { return 2 * ideal_max_; }

  std::size_t index(int k, int j) const { return static_cast<std::size_t>(k * rows_ + j); }

  friend bool operator==(const GroupingConfig& a, const GroupingConfig& b) {
    return a.columns_ == b.columns_ && a.rows_ == b.rows_ && a.levels_ == b.levels_;
  }

 private:
  int columns_;
  int rows_;
  int levels_;
  std::vector<std::int64_t> significance_;
  Weight ideal_max_ = 0;
};

inline std::vector<std::int64_t> significance_vector(const GroupingConfig& config) { return config.significance(); }

/// Programmed values of one array side's c x r cell group.
class Bitmap {
 public:
  Bitmap(int columns, int rows) : columns_(columns), rows_(rows), values_(static_cast<std::size_t>(columns * rows), 0) {}
  explicit Bitmap(const GroupingConfig& config) : Bitmap(config.columns(), config.rows()) {}
  Bitmap(const GroupingConfig& config, std::vector<CellValue> flat)
      : columns_(config.columns()), rows_(config.rows()), values_(std::move(flat)) {
    if (values_.size() != static_cast<std::size_t>(config.cells_per_side())) {
      throw ShapeError("bitmap has " + std::to_string(values_.size()) + " cells, layout needs " +
                       std::to_string(config.cells_per_side()));
    }
    for (CellValue v : values_) {
      if (v < 0 || v > config.max_cell()) throw ShapeError("bitmap cell value out of [0, L-1]");
    }
  }

  int columns() const { return columns_; }
  int rows() const { return rows_; }

  CellValue at(int k, int j) const { return values_[static_cast<std::size_t>(k * rows_ + j)]; }
  CellValue& at(int k, int j) { return values_[static_cast<std::size_t>(k * rows_ + j)]; }

  std::span<const CellValue> flat() const { return values_; }
  std::span<CellValue> flat() { return values_; }

  bool matches(const GroupingConfig& config) const {
    return columns_ == config.columns() && rows_ == config.rows();
  }

  std::int64_t cell_sum() const {
    std::int64_t sum = 0;
    for (CellValue v : values_) sum += v;
    return sum;
  }

  friend bool operator==(const Bitmap&, const Bitmap&) = default;

 private:
  int columns_;
  int rows_;
  std::vector<CellValue> values_;
};

/// Per-cell fault state. The numeric values are the file-format codes.
enum class CellFault : std::uint8_t { Free = 0, SA0 = 1, SA1 = 2 };

/// Fault state of one side's cells. Storing one code per cell keeps the SA0 and
/// SA1 indicator matrices disjoint by construction.
class FaultMapSide {
 public:
  FaultMapSide(int columns, int rows)
      : columns_(columns), rows_(rows), cells_(static_cast<std::size_t>(columns * rows), CellFault::Free) {}
  explicit FaultMapSide(const GroupingConfig& config) : FaultMapSide(config.columns(), config.rows()) {}
  FaultMapSide(const GroupingConfig& config, std::vector<CellFault> flat)
      : columns_(config.columns()), rows_(config.rows()), cells_(std::move(flat)) {
    if (cells_.size() != static_cast<std::size_t>(config.cells_per_side())) {
      throw ShapeError("fault side has " + std::to_string(cells_.size()) + " cells, layout needs " +
                       std::to_string(config.cells_per_side()));
    }
  }

  int columns() const { return columns_; }
  int rows() const { return rows_; }

  CellFault at(int k, int j) const { return cells_[static_cast<std::size_t>(k * rows_ + j)]; }
  void set(int k, int j, CellFault f) { cells_[static_cast<std::size_t>(k * rows_ + j)] = f; }

  bool sa0(int k, int j) const { return at(k, j) == CellFault::SA0; }
  bool sa1(int k, int j) const { return at(k, j) == CellFault::SA1; }
  bool stuck(int k, int j) const { return at(k, j) != CellFault::Free; }

  std::span<const CellFault> flat() const { return cells_; }

  int fault_count() const {
    int n = 0;
    for (CellFault f : cells_) n += f != CellFault::Free;
    return n;
  }

  bool matches(const GroupingConfig& config) const {
    return columns_ == config.columns() && rows_ == config.rows();
  }

  friend bool operator==(const FaultMapSide&, const FaultMapSide&) = default;

 private:
  int columns_;
  int rows_;
  std::vector<CellFault> cells_;
};

struct FaultMap {
  FaultMapSide pos;
  FaultMapSide neg;

  explicit FaultMap(const GroupingConfig& config) : pos(config), neg(config) {}
  FaultMap(FaultMapSide p, FaultMapSide n) : pos(std::move(p)), neg(std::move(n)) {
    if (pos.columns() != neg.columns() || pos.rows() != neg.rows()) throw ShapeError("fault map sides differ in shape");
  }

  int fault_count() const { return pos.fault_count() + neg.fault_count(); }
  bool matches(const GroupingConfig& config) const { return pos.matches(config) && neg.matches(config); }

  /// Builds a fault map from 2*c*r codes ordered pos then neg, each side
  /// significance-major then row.
  static FaultMap from_codes(const GroupingConfig& config, std::span<const CellFault> codes) {
    const auto n = static_cast<std::size_t>(config.cells_per_side());
    if (codes.size() != 2 * n) throw ShapeError("fault map needs 2*c*r codes");
    return FaultMap(FaultMapSide(config, {codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(n)}),
                    FaultMapSide(config, {codes.begin() + static_cast<std::ptrdiff_t>(n), codes.end()}));
  }

  std::vector<CellFault> codes() const {
    std::vector<CellFault> out(pos.flat().begin(), pos.flat().end());
    out.insert(out.end(), neg.flat().begin(), neg.flat().end());
    return out;
  }

  friend bool operator==(const FaultMap&, const FaultMap&) = default;
};

inline void require_shape(const Bitmap& bitmap, const GroupingConfig& config) {
  if (!bitmap.matches(config)) throw ShapeError("bitmap shape does not match layout");
}

inline void require_shape(const FaultMapSide& side, const GroupingConfig& config) {
  if (!side.matches(config)) throw ShapeError("fault map shape does not match layout");
}

inline void require_shape(const FaultMap& faults, const GroupingConfig& config) {
  if (!faults.matches(config)) throw ShapeError("fault map shape does not match layout");
}

/// s X 1: significance-weighted sum over all cells.
inline Weight decode(const Bitmap& bitmap, const GroupingConfig& config) {
  require_shape(bitmap, config);
  Weight out = 0;
  for (int k = 0; k < config.columns(); ++k) {
    Weight column = 0;
    for (int j = 0; j < config.rows(); ++j) column += bitmap.at(k, j);
    out += config.significance(k) * column;
  }
  return out;
}

/// Stuck cells take their pinned value; free cells keep the programmed value.
inline Bitmap inject_faults(const Bitmap& bitmap, const FaultMapSide& side, const GroupingConfig& config) {
  require_shape(bitmap, config);
  require_shape(side, config);
  Bitmap out = bitmap;
  for (int k = 0; k < config.columns(); ++k) {
    for (int j = 0; j < config.rows(); ++j) {
      switch (side.at(k, j)) {
        case CellFault::Free: break;
        case CellFault::SA0: out.at(k, j) = config.max_cell(); break;
        case CellFault::SA1: out.at(k, j) = 0; break;
      }
    }
  }
  return out;
}

/// d(f(X+)) - d(f(X-)).
inline Weight realized_weight(const Bitmap& pos, const Bitmap& neg, const FaultMap& faults,
                              const GroupingConfig& config) {
  return decode(inject_faults(pos, faults.pos, config), config) -
         decode(inject_faults(neg, faults.neg, config), config);
}

/// Zeroes every stuck cell. Compiler outputs are always in this form.
inline Bitmap normalize_stuck(Bitmap bitmap, const FaultMapSide& side) {
  for (int k = 0; k < bitmap.columns(); ++k) {
    for (int j = 0; j < bitmap.rows(); ++j) {
      if (side.stuck(k, j)) bitmap.at(k, j) = 0;
    }
  }
  return bitmap;
}

/// Fault-unaware sign-magnitude encoding: |w| goes to one side with greedy
/// MSB-first digits, each significance filled row by row. This is what a
/// compiler that ignores the fault map would program.
inline std::pair<Bitmap, Bitmap> naive_encode(Weight w, const GroupingConfig& config) {
  if (w > config.ideal_max() || w < config.ideal_min()) throw std::out_of_range("weight outside ideal range");
  Bitmap mag(config);
  Weight rest = w < 0 ? -w : w;
  for (int k = 0; k < config.columns(); ++k) {
    const std::int64_t s = config.significance(k);
    for (int j = 0; j < config.rows(); ++j) {
      const Weight digit = std::min<Weight>(config.max_cell(), rest / s);
      mag.at(k, j) = static_cast<CellValue>(digit);
      rest -= digit * s;
    }
  }
  if (w < 0) return {Bitmap(config), mag};
  return {mag, Bitmap(config)};
}

}  // namespace hgc

#pragma once

// Exact solver for the small bounded-integer programs that arise per weight,
// and the two per-weight models built on it:
//
//   FAWD: min sum(x)  s.t.  d(f(X+)) - d(f(X-)) = w,  0 <= x <= L-1
//   CVM:  min t       s.t.  -t <= w - d(f(X+)) + d(f(X-)) <= t
//
// Only free cells become variables; stuck cells enter through the constant
// stuck offset. solve() is a depth-first branch-and-bound in variable-index
// order with values tried in ascending order. Node bounds come from interval
// propagation, a gcd test on each row, and an exact rational LP relaxation.
// Once the remaining constraints collapse onto one linear form (the FAWD model
// at the root, the CVM model after t is fixed) the subtree is finished by a
// dynamic program over that form's reachable values.
//
// Ties: the secondary objective breaks ties in the primary one, and remaining
// ties resolve to the lexicographically smallest assignment in index order.

#include <hgc/compiled.hpp>
#include <hgc/core.hpp>
#include <hgc/lp.hpp>
#include <hgc/range.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hgc {

struct IlpVariable {
  std::int64_t lower = 0;
  std::int64_t upper = 0;
};

struct LinearRow {
  std::vector<std::int64_t> coeffs;
  std::int64_t rhs = 0;
};

struct IlpModel {
  std::vector<IlpVariable> variables;
  std::vector<std::int64_t> objective;            // minimized
  std::vector<std::int64_t> secondary_objective;  // optional tie-break; empty means none
  std::vector<LinearRow> equalities;              // coeffs . x == rhs
  std::vector<LinearRow> inequalities;            // coeffs . x <= rhs
};

enum class IlpStatus { Optimal, Infeasible };

struct IlpSolution {
  IlpStatus status = IlpStatus::Infeasible;
  std::vector<std::int64_t> assignment;
  std::int64_t objective_value = 0;
  std::int64_t secondary_value = 0;
  std::int64_t nodes = 0;
};

struct IlpOptions {
  std::size_t variable_cap = 64;
  bool use_dp = true;
  std::int64_t dp_window_cap = std::int64_t{1} << 22;
};

struct MalformedModel : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SolverCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return -floor_div(-a, b); }

inline void validate(const IlpModel& model, const IlpOptions& options) {
  const std::size_t n = model.variables.size();
  if (n > options.variable_cap) {
    throw SolverCapExceeded("model has " + std::to_string(n) + " variables, cap is " +
                            std::to_string(options.variable_cap));
  }
  if (model.objective.size() != n) throw MalformedModel("objective length does not match variable count");
  if (!model.secondary_objective.empty() && model.secondary_objective.size() != n) {
    throw MalformedModel("secondary objective length does not match variable count");
  }
  for (const auto* rows : {&model.equalities, &model.inequalities}) {
    for (const auto& row : *rows) {
      if (row.coeffs.size() != n) throw MalformedModel("constraint length does not match variable count");
    }
  }
  // Magnitudes must leave room for the scalarized objective and activity sums.
  constexpr __int128 limit = __int128{1} << 60;
  for (const auto& v : model.variables) {
    if (v.lower < -limit || v.upper > limit) throw MalformedModel("variable bound too large");
    if (v.lower > v.upper) throw MalformedModel("variable lower bound exceeds upper bound");
  }
}

class BranchAndBound {
 public:
  BranchAndBound(const IlpModel& model, const IlpOptions& options)
      : options_(options), n_(model.variables.size()), vars_(model.variables) {
    // Lexicographic (primary, secondary) as one objective: primary * M + secondary
    // with M larger than the secondary's spread over the box.
    __int128 spread = 0;
    if (!model.secondary_objective.empty()) {
      for (std::size_t i = 0; i < n_; ++i) {
        const __int128 s = model.secondary_objective[i];
        spread += (s < 0 ? -s : s) * (static_cast<__int128>(vars_[i].upper) - vars_[i].lower);
      }
    }
    const __int128 scale = spread + 1;
    cost_.resize(n_);
    __int128 magnitude = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const __int128 sec = model.secondary_objective.empty() ? 0 : model.secondary_objective[i];
      const __int128 c = static_cast<__int128>(model.objective[i]) * scale + sec;
      const __int128 reach = std::max(c < 0 ? -c : c, __int128{1}) *
                             std::max(vars_[i].upper < 0 ? -__int128{vars_[i].upper} : __int128{vars_[i].upper},
                                      vars_[i].lower < 0 ? -__int128{vars_[i].lower} : __int128{vars_[i].lower});
      magnitude += reach;
      if (c > (__int128{1} << 60) || c < -(__int128{1} << 60) || magnitude > (__int128{1} << 60)) {
        throw MalformedModel("objective magnitude too large for exact search");
      }
      cost_[i] = static_cast<std::int64_t>(c);
    }
    for (const auto& r : model.equalities) rows_.push_back({r.coeffs, r.rhs, true});
    for (const auto& r : model.inequalities) rows_.push_back({r.coeffs, r.rhs, false});
    for (const auto& r : rows_) {
      __int128 activity = std::abs(r.rhs);
      for (std::size_t i = 0; i < n_; ++i) {
        const __int128 a = r.coeffs[i] < 0 ? -__int128{r.coeffs[i]} : __int128{r.coeffs[i]};
        const __int128 b = std::max(vars_[i].upper < 0 ? -__int128{vars_[i].upper} : __int128{vars_[i].upper},
                                    vars_[i].lower < 0 ? -__int128{vars_[i].lower} : __int128{vars_[i].lower});
        activity += a * b;
      }
      if (activity > (__int128{1} << 60)) throw MalformedModel("constraint activity too large for exact search");
    }
    // Remaining-cost floor for each suffix: every variable at its cheaper bound.
    suffix_floor_.assign(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) {
      suffix_floor_[i] = suffix_floor_[i + 1] + std::min(cost_[i] * vars_[i].lower, cost_[i] * vars_[i].upper);
    }
    x_.assign(n_, 0);
    fixed_activity_.assign(rows_.size(), 0);
  }

  std::optional<std::vector<std::int64_t>> run(std::int64_t& nodes) {
    for (const auto& v : vars_) {
      if (v.lower > v.upper) return std::nullopt;
    }
    search(0, 0);
    nodes = nodes_;
    if (!best_) return std::nullopt;
    return best_x_;
  }

 private:
  struct Row {
    std::vector<std::int64_t> coeffs;
    std::int64_t rhs;
    bool equality;
  };

  // Row with the fixed prefix folded into rhs and rhs tightened by the gcd of
  // the remaining coefficients.
  struct Residual {
    std::int64_t rhs;
    std::int64_t gcd;
    bool active;  // any nonzero coefficient among unfixed variables
  };

  void record(std::int64_t value, const std::vector<std::int64_t>& x) {
    if (!best_ || value < *best_) {
      best_ = value;
      best_x_ = x;
    }
  }

  bool prunable(std::int64_t bound) const { return best_ && bound >= *best_; }

  void search(std::size_t depth, std::int64_t fixed_cost) {
    ++nodes_;
    if (prunable(fixed_cost + suffix_floor_[depth])) return;

    std::vector<Residual> residual(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      const Row& row = rows_[r];
      std::int64_t rhs = row.rhs - fixed_activity_[r];
      std::int64_t lo = 0;
      std::int64_t hi = 0;
      std::int64_t g = 0;
      for (std::size_t i = depth; i < n_; ++i) {
        const std::int64_t a = row.coeffs[i];
        if (a == 0) continue;
        lo += std::min(a * vars_[i].lower, a * vars_[i].upper);
        hi += std::max(a * vars_[i].lower, a * vars_[i].upper);
        g = std::gcd(g, a);
      }
      if (row.equality) {
        if (rhs < lo || rhs > hi) return;
        if (g > 0 && rhs % g != 0) return;
      } else {
        if (g > 0) rhs = floor_div(rhs, g) * g;
        if (lo > rhs) return;
      }
      residual[r] = {rhs, g, g > 0};
    }

    if (depth == n_) {
      record(fixed_cost, x_);
      return;
    }

    if (options_.use_dp && try_dp(depth, fixed_cost, residual)) return;

    if (const auto bound = lp_bound(depth, residual); !bound) {
      return;
    } else if (prunable(fixed_cost + *bound)) {
      return;
    }

    const std::int64_t c = cost_[depth];
    for (std::int64_t v = vars_[depth].lower; v <= vars_[depth].upper; ++v) {
      const std::int64_t child_cost = fixed_cost + c * v;
      if (c > 0 && prunable(child_cost + suffix_floor_[depth + 1])) break;
      x_[depth] = v;
      for (std::size_t r = 0; r < rows_.size(); ++r) fixed_activity_[r] += rows_[r].coeffs[depth] * v;
      search(depth + 1, child_cost);
      for (std::size_t r = 0; r < rows_.size(); ++r) fixed_activity_[r] -= rows_[r].coeffs[depth] * v;
    }
    x_[depth] = 0;
  }

  // Lower bound on the remaining cost from the LP relaxation of the subtree,
  // or nullopt if the relaxation is infeasible.
  std::optional<std::int64_t> lp_bound(std::size_t depth, const std::vector<Residual>& residual) const {
    lp::Problem p;
    std::int64_t base = 0;
    for (std::size_t i = depth; i < n_; ++i) {
      p.upper.push_back(vars_[i].upper - vars_[i].lower);
      p.cost.push_back(cost_[i]);
      base += cost_[i] * vars_[i].lower;
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!residual[r].active) continue;
      std::vector<std::int64_t> coeffs;
      std::int64_t shift = 0;
      for (std::size_t i = depth; i < n_; ++i) {
        coeffs.push_back(rows_[r].coeffs[i]);
        shift += rows_[r].coeffs[i] * vars_[i].lower;
      }
      p.rows.push_back(std::move(coeffs));
      p.rhs.push_back(residual[r].rhs - shift);
      p.equality.push_back(rows_[r].equality);
    }
    const auto value = lp::minimize(p);
    if (!value) return std::nullopt;
    return base + value->ceil();
  }

  // When every active row is a multiple of one integer form a . x, the
  // remaining problem is "lo <= a . x <= hi, minimize cost" and a DP over the
  // reachable values of a . x solves it exactly.
  bool try_dp(std::size_t depth, std::int64_t fixed_cost, const std::vector<Residual>& residual) {
    std::vector<std::int64_t> form;
    std::int64_t lo = std::numeric_limits<std::int64_t>::min() / 4;
    std::int64_t hi = std::numeric_limits<std::int64_t>::max() / 4;
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      if (!residual[r].active) continue;
      const auto& coeffs = rows_[r].coeffs;
      std::int64_t g = residual[r].gcd;
      std::size_t lead = depth;
      while (coeffs[lead] == 0) ++lead;
      if (coeffs[lead] < 0) g = -g;
      std::vector<std::int64_t> normalized(coeffs.begin() + static_cast<std::ptrdiff_t>(depth), coeffs.end());
      for (auto& a : normalized) a /= g;
      if (form.empty()) {
        form = std::move(normalized);
      } else if (form != normalized) {
        return false;
      }
      // row: g * form . x (== | <=) rhs
      const std::int64_t rhs = residual[r].rhs;
      if (rows_[r].equality) {
        const std::int64_t t = rhs / g;  // divisibility already checked
        lo = std::max(lo, t);
        hi = std::min(hi, t);
      } else if (g > 0) {
        hi = std::min(hi, floor_div(rhs, g));
      } else {
        lo = std::max(lo, ceil_div(rhs, g));
      }
    }
    if (form.empty()) form.assign(n_ - depth, 0);
    if (lo > hi) return true;

    const std::size_t q = n_ - depth;
    std::vector<std::int64_t> smin(q + 1, 0);
    std::vector<std::int64_t> smax(q + 1, 0);
    for (std::size_t i = q; i-- > 0;) {
      const auto& v = vars_[depth + i];
      smin[i] = smin[i + 1] + std::min(form[i] * v.lower, form[i] * v.upper);
      smax[i] = smax[i + 1] + std::max(form[i] * v.lower, form[i] * v.upper);
    }
    if (smax[0] - smin[0] + 1 > options_.dp_window_cap) return false;

    constexpr std::int64_t inf = std::numeric_limits<std::int64_t>::max() / 4;
    // best[i][s - smin[i]]: cheapest way for variables i.. to reach form value s.
    std::vector<std::vector<std::int64_t>> best(q + 1);
    best[q] = {0};
    for (std::size_t i = q; i-- > 0;) {
      const auto& v = vars_[depth + i];
      best[i].assign(static_cast<std::size_t>(smax[i] - smin[i] + 1), inf);
      const auto& next = best[i + 1];
      for (std::size_t t = 0; t < next.size(); ++t) {
        if (next[t] >= inf) continue;
        const std::int64_t tail = smin[i + 1] + static_cast<std::int64_t>(t);
        for (std::int64_t val = v.lower; val <= v.upper; ++val) {
          const std::int64_t s = form[i] * val + tail;
          auto& slot = best[i][static_cast<std::size_t>(s - smin[i])];
          slot = std::min(slot, cost_[depth + i] * val + next[t]);
        }
      }
    }

    const auto in_window = [&](std::size_t i, std::int64_t a, std::int64_t b, std::int64_t& out) {
      // cheapest best[i][s] for s in [a, b]
      out = inf;
      a = std::max(a, smin[i]);
      b = std::min(b, smax[i]);
      for (std::int64_t s = a; s <= b; ++s) out = std::min(out, best[i][static_cast<std::size_t>(s - smin[i])]);
    };

    std::int64_t optimum = inf;
    in_window(0, lo, hi, optimum);
    if (optimum >= inf) return true;
    if (prunable(fixed_cost + optimum)) return true;

    // Walk forward taking the smallest value that still admits an optimal completion.
    std::vector<std::int64_t> x = x_;
    std::int64_t partial_sum = 0;
    std::int64_t partial_cost = 0;
    for (std::size_t i = 0; i < q; ++i) {
      const auto& v = vars_[depth + i];
      bool placed = false;
      for (std::int64_t val = v.lower; val <= v.upper && !placed; ++val) {
        const std::int64_t sum = partial_sum + form[i] * val;
        const std::int64_t cost = partial_cost + cost_[depth + i] * val;
        std::int64_t rest = inf;
        in_window(i + 1, lo - sum, hi - sum, rest);
        if (rest < inf && cost + rest == optimum) {
          x[depth + i] = val;
          partial_sum = sum;
          partial_cost = cost;
          placed = true;
        }
      }
      if (!placed) throw std::logic_error("DP reconstruction lost the optimum");
    }
    record(fixed_cost + optimum, x);
    return true;
  }

  IlpOptions options_;
  std::size_t n_;
  std::vector<IlpVariable> vars_;
  std::vector<std::int64_t> cost_;
  std::vector<Row> rows_;
  std::vector<std::int64_t> suffix_floor_;
  std::vector<std::int64_t> x_;
  std::vector<std::int64_t> fixed_activity_;
  std::optional<std::int64_t> best_;
  std::vector<std::int64_t> best_x_;
  std::int64_t nodes_ = 0;
};

}  // namespace detail

/// Provably optimal solution or Infeasible. Deterministic for a given model.
inline IlpSolution solve(const IlpModel& model, const IlpOptions& options = {}) {
  detail::validate(model, options);
  IlpSolution out;
  detail::BranchAndBound bnb(model, options);
  auto x = bnb.run(out.nodes);
  if (!x) return out;
  out.status = IlpStatus::Optimal;
  out.assignment = std::move(*x);
  for (std::size_t i = 0; i < model.variables.size(); ++i) {
    out.objective_value += model.objective[i] * out.assignment[i];
    if (!model.secondary_objective.empty()) out.secondary_value += model.secondary_objective[i] * out.assignment[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Per-weight models

/// A programmable cell of one weight's group.
struct CellRef {
  bool negative = false;
  int k = 0;
  int j = 0;
};

/// Free cells in file order: positive side then negative, significance-major.
inline std::vector<CellRef> free_cells(const FaultMap& faults, const GroupingConfig& config) {
  std::vector<CellRef> out;
  for (bool negative : {false, true}) {
    const FaultMapSide& side = negative ? faults.neg : faults.pos;
    for (int k = 0; k < config.columns(); ++k) {
      for (int j = 0; j < config.rows(); ++j) {
        if (!side.stuck(k, j)) out.push_back({negative, k, j});
      }
    }
  }
  return out;
}

namespace detail {

inline std::int64_t signed_significance(const CellRef& cell, const GroupingConfig& config) {
  const std::int64_t s = config.significance(cell.k);
  return cell.negative ? -s : s;
}

inline CompiledWeight assemble(Weight w, const FaultMap& faults, const GroupingConfig& config,
                               const std::vector<CellRef>& cells, const std::vector<std::int64_t>& assignment,
                               std::size_t first_cell_var, SolvePath path) {
  Bitmap pos(config);
  Bitmap neg(config);
  for (std::size_t v = 0; v < cells.size(); ++v) {
    const auto& cell = cells[v];
    (cell.negative ? neg : pos).at(cell.k, cell.j) = static_cast<CellValue>(assignment[first_cell_var + v]);
  }
  CompiledWeight out{pos, neg, 0, 0, path};
  out.realized = realized_weight(out.pos, out.neg, faults, config);
  out.residual = w - out.realized;
  return out;
}

}  // namespace detail

/// min sum(x) subject to the realized weight equalling w exactly.
inline IlpModel build_fawd_model(Weight w, const FaultMap& faults, const GroupingConfig& config) {
  require_shape(faults, config);
  const auto cells = free_cells(faults, config);
  IlpModel model;
  LinearRow row;
  for (const auto& cell : cells) {
    model.variables.push_back({0, config.max_cell()});
    model.objective.push_back(1);
    row.coeffs.push_back(detail::signed_significance(cell, config));
  }
  row.rhs = w - stuck_offset(faults, config);
  model.equalities.push_back(std::move(row));
  return model;
}

/// Variable 0 is t; the free cells follow in file order. min t with
/// -t <= w - realized <= t; the cell sum is the secondary objective.
inline IlpModel build_cvm_model(Weight w, const FaultMap& faults, const GroupingConfig& config) {
  require_shape(faults, config);
  const auto cells = free_cells(faults, config);
  const Weight offset = stuck_offset(faults, config);
  const Weight magnitude = w < 0 ? -w : w;
  const Weight t_upper = std::max(config.ideal_width(), magnitude + config.ideal_max());

  IlpModel model;
  model.variables.push_back({0, t_upper});
  model.objective.push_back(1);
  model.secondary_objective.push_back(0);
  LinearRow above;  // realized - w <= t  ->   a.x - t <= w - C
  LinearRow below;  // w - realized <= t  ->  -a.x - t <= C - w
  above.coeffs.push_back(-1);
  below.coeffs.push_back(-1);
  for (const auto& cell : cells) {
    model.variables.push_back({0, config.max_cell()});
    model.objective.push_back(0);
    model.secondary_objective.push_back(1);
    const std::int64_t a = detail::signed_significance(cell, config);
    above.coeffs.push_back(a);
    below.coeffs.push_back(-a);
  }
  above.rhs = w - offset;
  below.rhs = offset - w;
  model.inequalities.push_back(std::move(above));
  model.inequalities.push_back(std::move(below));
  return model;
}

/// Sparsest exact decomposition, or nullopt when w is not representable.
inline std::optional<CompiledWeight> fawd_ilp(Weight w, const FaultMap& faults, const GroupingConfig& config,
                                              const IlpOptions& options = {}) {
  const auto solution = solve(build_fawd_model(w, faults, config), options);
  if (solution.status != IlpStatus::Optimal) return std::nullopt;
  return detail::assemble(w, faults, config, free_cells(faults, config), solution.assignment, 0, SolvePath::IlpFawd);
}

/// Closest representable value; ties go to the smaller cell sum, then the
/// lexicographically smaller bitmap pair.
inline CompiledWeight cvm_ilp(Weight w, const FaultMap& faults, const GroupingConfig& config,
                              const IlpOptions& options = {}) {
  const auto solution = solve(build_cvm_model(w, faults, config), options);
  if (solution.status != IlpStatus::Optimal) throw std::logic_error("CVM model reported infeasible");
  return detail::assemble(w, faults, config, free_cells(faults, config), solution.assignment, 1, SolvePath::IlpCvm);
}

}  // namespace hgc

#pragma once

// Bounded-variable primal simplex in exact rational arithmetic. Used only as a
// relaxation bound inside the branch-and-bound in ilp.hpp, so it handles the
// shape that arises there: variables in [0, upper], equality and <= rows.

#include <hgc/rational.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace hgc::lp {

struct Problem {
  std::vector<std::int64_t> upper;  // x_j in [0, upper_j]
  std::vector<std::int64_t> cost;   // minimized
  std::vector<std::vector<std::int64_t>> rows;
  std::vector<std::int64_t> rhs;
  std::vector<bool> equality;  // false means coeffs . x <= rhs
};

namespace detail {

class Simplex {
 public:
  explicit Simplex(const Problem& p) : m_(p.rows.size()), n_(p.upper.size()) {
    // Columns: structural, one slack per <= row, one artificial per row that
    // cannot start with its slack in the basis.
    std::vector<std::size_t> slack_col(m_, npos);
    std::size_t col = n_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (!p.equality[i]) slack_col[i] = col++;
    }
    std::vector<std::size_t> art_col(m_, npos);
    for (std::size_t i = 0; i < m_; ++i) {
      if (p.equality[i] || p.rhs[i] < 0) art_col[i] = col++;
    }
    cols_ = col;

    lower_.assign(cols_, Rational(0));
    upper_.assign(cols_, Rational(0));
    finite_upper_.assign(cols_, false);
    for (std::size_t j = 0; j < n_; ++j) {
      upper_[j] = Rational(p.upper[j]);
      finite_upper_[j] = true;
    }
    artificial_.assign(cols_, false);
    for (std::size_t i = 0; i < m_; ++i) {
      if (art_col[i] != npos) artificial_[art_col[i]] = true;
    }

    tableau_.assign(m_, std::vector<Rational>(cols_, Rational(0)));
    basis_.assign(m_, 0);
    x_.assign(cols_, Rational(0));
    at_upper_.assign(cols_, false);
    is_basic_.assign(cols_, false);

    for (std::size_t i = 0; i < m_; ++i) {
      auto& row = tableau_[i];
      for (std::size_t j = 0; j < n_; ++j) row[j] = Rational(p.rows[i][j]);
      Rational b(p.rhs[i]);
      if (slack_col[i] != npos) row[slack_col[i]] = Rational(1);
      std::size_t basic = slack_col[i];
      if (art_col[i] != npos) {
        // Artificial coefficient is chosen so its start value |b| is >= 0; the
        // row is then negated if needed to make the basic column a unit vector.
        const bool negate = b.sign() < 0;
        row[art_col[i]] = Rational(negate ? -1 : 1);
        if (negate) {
          for (auto& v : row) v = -v;
          b = -b;
        }
        basic = art_col[i];
      }
      basis_[i] = basic;
      is_basic_[basic] = true;
      x_[basic] = b;
    }
  }

  std::optional<Rational> run(const std::vector<std::int64_t>& cost) {
    bool has_artificial = false;
    std::vector<Rational> phase1(cols_, Rational(0));
    for (std::size_t j = 0; j < cols_; ++j) {
      if (artificial_[j]) {
        phase1[j] = Rational(1);
        has_artificial = true;
      }
    }
    if (has_artificial) {
      optimize(phase1);
      Rational infeasibility(0);
      for (std::size_t j = 0; j < cols_; ++j) {
        if (artificial_[j]) infeasibility += x_[j];
      }
      if (infeasibility.sign() > 0) return std::nullopt;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (artificial_[j]) {
          upper_[j] = Rational(0);
          finite_upper_[j] = true;
        }
      }
    }
    std::vector<Rational> phase2(cols_, Rational(0));
    for (std::size_t j = 0; j < n_; ++j) phase2[j] = Rational(cost[j]);
    optimize(phase2);
    Rational value(0);
    for (std::size_t j = 0; j < n_; ++j) value += phase2[j] * x_[j];
    return value;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  // Bland's rule on both entering and leaving choices; with exact arithmetic
  // this terminates.
  void optimize(const std::vector<Rational>& cost) {
    for (;;) {
      std::size_t enter = npos;
      int dir = 0;
      for (std::size_t j = 0; j < cols_ && enter == npos; ++j) {
        if (is_basic_[j]) continue;
        Rational d = cost[j];
        for (std::size_t i = 0; i < m_; ++i) {
          if (!tableau_[i][j].is_zero()) d -= cost[basis_[i]] * tableau_[i][j];
        }
        const bool can_rise = !at_upper_[j] && (!finite_upper_[j] || upper_[j] > lower_[j]);
        if (can_rise && d.sign() < 0) {
          enter = j;
          dir = 1;
        } else if (at_upper_[j] && d.sign() > 0) {
          enter = j;
          dir = -1;
        }
      }
      if (enter == npos) return;

      std::optional<Rational> theta;
      std::size_t leave_row = npos;
      std::size_t leave_col = npos;
      bool leave_upper = false;
      if (finite_upper_[enter]) {
        theta = upper_[enter] - lower_[enter];
        leave_col = enter;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        const Rational alpha = dir > 0 ? tableau_[i][enter] : -tableau_[i][enter];
        if (alpha.is_zero()) continue;
        const std::size_t b = basis_[i];
        std::optional<Rational> limit;
        if (alpha.sign() > 0) {
          limit = (x_[b] - lower_[b]) / alpha;
        } else if (finite_upper_[b]) {
          limit = (upper_[b] - x_[b]) / (-alpha);
        }
        if (!limit) continue;
        if (!theta || *limit < *theta || (*limit == *theta && b < leave_col)) {
          theta = limit;
          leave_row = i;
          leave_col = b;
          leave_upper = alpha.sign() < 0;
        }
      }
      if (!theta) throw std::logic_error("LP relaxation unbounded");

      const Rational step = dir > 0 ? *theta : -*theta;
      for (std::size_t i = 0; i < m_; ++i) {
        if (!tableau_[i][enter].is_zero()) x_[basis_[i]] -= step * tableau_[i][enter];
      }
      x_[enter] += step;

      if (leave_row == npos) {
        at_upper_[enter] = dir > 0;
        x_[enter] = at_upper_[enter] ? upper_[enter] : lower_[enter];
        continue;
      }

      const std::size_t out = basis_[leave_row];
      const bool out_at_upper = leave_upper;
      pivot(leave_row, enter);
      is_basic_[out] = false;
      at_upper_[out] = out_at_upper;
      x_[out] = out_at_upper ? upper_[out] : lower_[out];
      is_basic_[enter] = true;
      at_upper_[enter] = false;
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const Rational p = tableau_[r][c];
    for (auto& v : tableau_[r]) {
      if (!v.is_zero()) v = v / p;
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      const Rational f = tableau_[i][c];
      if (f.is_zero()) continue;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!tableau_[r][j].is_zero()) tableau_[i][j] -= f * tableau_[r][j];
      }
    }
    basis_[r] = c;
  }

  std::size_t m_;
  std::size_t n_;
  std::size_t cols_ = 0;
  std::vector<std::vector<Rational>> tableau_;
  std::vector<std::size_t> basis_;
  std::vector<Rational> x_;
  std::vector<Rational> lower_;
  std::vector<Rational> upper_;
  std::vector<bool> finite_upper_;
  std::vector<bool> at_upper_;
  std::vector<bool> is_basic_;
  std::vector<bool> artificial_;
};

}  // namespace detail

/// Minimum of the relaxation, or nullopt when it is infeasible.
inline std::optional<Rational> minimize(const Problem& problem) {
  return detail::Simplex(problem).run(problem.cost);
}

}  // namespace hgc::lp

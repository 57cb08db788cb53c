#pragma once

// Per-weight routing: range check -> consecutivity trigger -> exact
// decomposition (table or ILP) -> closest value matching. The trigger is only
// a sufficient condition for gaps, so an exact search that comes back empty
// also falls through to closest value matching.

#include <hgc/compiled.hpp>
#include <hgc/core.hpp>
#include <hgc/ilp.hpp>
#include <hgc/range.hpp>
#include <hgc/table.hpp>

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

namespace hgc {

enum class ForcePath { Auto, Table, Ilp };

struct CompilePolicy {
  ForcePath force_path = ForcePath::Auto;
  std::int64_t table_budget = 4096;  // Auto uses tables when L^(c*r) <= this
  int thread_count = 1;
  std::int64_t enumeration_budget = kDefaultEnumerationBudget;
};

/// Seconds spent in each stage, summed over weights (and threads).
struct StageTimes {
  double condition = 0;
  double fawd = 0;
  double cvm = 0;

  StageTimes& operator+=(const StageTimes& o) {
    condition += o.condition;
    fawd += o.fawd;
    cvm += o.cvm;
    return *this;
  }
};

struct CompileReport {
  std::vector<CompiledWeight> weights;
  std::int64_t l1 = 0;
  std::map<Weight, std::int64_t> histogram;  // |residual| -> count
  std::array<std::int64_t, kAllPaths.size()> path_counts{};
  StageTimes times;

  std::int64_t count(SolvePath p) const { return path_counts[static_cast<std::size_t>(p)]; }
};

/// Out-of-range weights: the optimum sits on the nearer range end, reached by
/// filling one side's free cells with L-1 and leaving the other side at 0.
inline CompiledWeight clamp_solution(Weight w, const FaultMap& faults, const RangeInfo& range,
                                     const GroupingConfig& config) {
  if (range.contains(w)) throw std::invalid_argument("clamp_solution called with an in-range weight");
  const bool above = w > range.max_value;
  Bitmap full(config);
  const FaultMapSide& side = above ? faults.pos : faults.neg;
  for (int k = 0; k < config.columns(); ++k) {
    for (int j = 0; j < config.rows(); ++j) {
      if (!side.stuck(k, j)) full.at(k, j) = config.max_cell();
    }
  }
  CompiledWeight out{above ? full : Bitmap(config), above ? Bitmap(config) : full, 0, 0, SolvePath::Clamp};
  out.realized = above ? range.max_value : range.min_value;
  out.residual = w - out.realized;
  return out;
}

/// Compiles weights for one layout, sharing a table cache across calls.
class Compiler {
 public:
  Compiler(GroupingConfig config, CompilePolicy policy)
      : config_(std::move(config)), policy_(policy), cache_(std::max(policy.table_budget, kDefaultTableBudget)) {
    if (policy_.table_budget <= 0 || policy_.enumeration_budget <= 0) throw std::invalid_argument("budgets must be positive");
    switch (policy_.force_path) {
      case ForcePath::Auto: use_table_ = side_assignment_count(config_) <= policy_.table_budget; break;
      case ForcePath::Table: use_table_ = side_assignment_count(config_) <= kDefaultTableBudget; break;
      case ForcePath::Ilp: use_table_ = false; break;
    }
  }

  const GroupingConfig& config() const { return config_; }
  const CompilePolicy& policy() const { return policy_; }
  bool uses_table() const { return use_table_; }
  std::size_t table_builds() const { return cache_.builds(); }

  CompiledWeight compile(Weight w, const FaultMap& faults, StageTimes* times = nullptr) {
    using clock = std::chrono::steady_clock;
    require_shape(faults, config_);
    StageTimes local;
    const auto t0 = clock::now();
    const RangeInfo range = representable_range(faults, config_);
    if (!range.contains(w)) {
      auto out = clamp_solution(w, faults, range, config_);
      local.condition += seconds(t0, clock::now());
      if (times) *times += local;
      return out;
    }
    const bool triggered = inconsecutivity_trigger(faults, config_).triggered;
    const auto t1 = clock::now();
    local.condition += seconds(t0, t1);

    std::optional<DecompositionTable> table;
    if (use_table_) table = cache_.table(faults, config_);

    auto t2 = t1;
    if (!triggered) {
      auto exact = table ? fawd_table_lookup(w, *table) : fawd_ilp(w, faults, config_);
      t2 = clock::now();
      local.fawd += seconds(t1, t2);
      if (exact) {
        if (times) *times += local;
        return std::move(*exact);
      }
    }
    auto closest = table ? cvm_table_lookup(w, *table) : cvm_ilp(w, faults, config_);
    local.cvm += seconds(t2, clock::now());
    if (times) *times += local;
    return closest;
  }

  /// One result per input, in input order. Results do not depend on
  /// thread_count: every weight is solved independently and deterministically.
  CompileReport compile_tensor(std::span<const Weight> weights, std::span<const FaultMap> faults) {
    if (weights.size() != faults.size()) {
      throw std::invalid_argument("weights and fault maps differ in length (" + std::to_string(weights.size()) +
                                  " vs " + std::to_string(faults.size()) + ")");
    }
    CompileReport report;
    std::vector<std::optional<CompiledWeight>> slots(weights.size());
    const std::size_t threads =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, policy_.thread_count)), std::max<std::size_t>(1, weights.size()));

    if (threads <= 1) {
      for (std::size_t i = 0; i < weights.size(); ++i) slots[i] = compile(weights[i], faults[i], &report.times);
    } else {
      constexpr std::size_t chunk = 256;
      std::atomic<std::size_t> next{0};
      std::vector<StageTimes> per_thread(threads);
      std::vector<std::exception_ptr> errors(threads);
      {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            try {
              for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= weights.size()) break;
                const std::size_t end = std::min(begin + chunk, weights.size());
                for (std::size_t i = begin; i < end; ++i) slots[i] = compile(weights[i], faults[i], &per_thread[t]);
              }
            } catch (...) {
              errors[t] = std::current_exception();
            }
          });
        }
      }
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
      for (const auto& t : per_thread) report.times += t;
    }

    report.weights.reserve(slots.size());
    for (auto& s : slots) {
      const auto& cw = *s;
      const Weight mag = cw.residual < 0 ? -cw.residual : cw.residual;
      report.l1 += mag;
      ++report.histogram[mag];
      ++report.path_counts[static_cast<std::size_t>(cw.path)];
      report.weights.push_back(std::move(*s));
    }
    return report;
  }

 private:
  static double seconds(std::chrono::steady_clock::time_point a, std::chrono::steady_clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  }

  GroupingConfig config_;
  CompilePolicy policy_;
  TableCache cache_;
  bool use_table_ = true;
};

inline CompiledWeight compile_weight(Weight w, const FaultMap& faults, const GroupingConfig& config,
                                     const CompilePolicy& policy = {}) {
  Compiler compiler(config, policy);
  return compiler.compile(w, faults);
}

inline CompileReport compile_tensor(std::span<const Weight> weights, std::span<const FaultMap> faults,
                                    const GroupingConfig& config, const CompilePolicy& policy = {}) {
  Compiler compiler(config, policy);
  return compiler.compile_tensor(weights, faults);
}

}  // namespace hgc

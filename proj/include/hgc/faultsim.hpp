#pragma once

// Random fault maps and Monte Carlo statistics over them.
//
// Sample i of a run with seed S always draws from its own stream (S, i), so a
// run can be split across threads in any way and still reproduce bit for bit.

#include <hgc/core.hpp>
#include <hgc/pipeline.hpp>
#include <hgc/range.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hgc {

struct FaultRates {
  double p_sa0 = 0;
  double p_sa1 = 0;
};

/// Measured stuck-at rates of a fabricated ReRAM array (SA0 1.75%, SA1 9.04%).
inline constexpr FaultRates kReferenceRates{0.0175, 0.0904};

inline void validate(const FaultRates& rates) {
  if (!std::isfinite(rates.p_sa0) || !std::isfinite(rates.p_sa1) || rates.p_sa0 < 0 || rates.p_sa1 < 0 ||
      rates.p_sa0 + rates.p_sa1 > 1) {
    throw std::invalid_argument("fault rates must satisfy 0 <= p_sa0, p_sa1 and p_sa0 + p_sa1 <= 1");
  }
}

/// SplitMix64 stream keyed by (seed, sample index).
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index) : state_(mix(seed + mix(index + 0x632BE59BD9B4E019ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

inline CellFault draw_cell(const FaultRates& rates, SampleStream& stream) {
  const double u = stream.uniform();
  if (u < rates.p_sa0) return CellFault::SA0;
  if (u < rates.p_sa0 + rates.p_sa1) return CellFault::SA1;
  return CellFault::Free;
}

/// Each of the 2*c*r cells independently: SA0 with p_sa0, SA1 with p_sa1.
/// Cells are drawn in file order (pos then neg, significance-major).
inline FaultMap sample_faultmap(const GroupingConfig& config, const FaultRates& rates, SampleStream& stream) {
  validate(rates);
  std::vector<CellFault> codes(static_cast<std::size_t>(config.cells_per_weight()));
  for (auto& c : codes) c = draw_cell(rates, stream);
  return FaultMap::from_codes(config, codes);
}

inline std::int64_t level_count(const GroupingConfig& config) { return config.ideal_max() + 1; }

enum class InconsecMethod { Trigger, Exact };

namespace detail {

// Runs body(begin, end, partial) over [0, n) split into contiguous blocks and
// returns the per-block partial results in block order.
template <typename Partial, typename Body>
std::vector<Partial> parallel_blocks(std::int64_t n, int threads, Body body) {
  const auto t = static_cast<std::int64_t>(std::max(1, threads));
  std::vector<Partial> partials(static_cast<std::size_t>(t));
  if (t == 1) {
    body(0, n, partials[0]);
    return partials;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(t));
  {
    std::vector<std::jthread> pool;
    for (std::int64_t b = 0; b < t; ++b) {
      pool.emplace_back([&, b] {
        try {
          body(n * b / t, n * (b + 1) / t, partials[static_cast<std::size_t>(b)]);
        } catch (...) {
          errors[static_cast<std::size_t>(b)] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return partials;
}

inline bool is_inconsecutive(const FaultMap& faults, const GroupingConfig& config, InconsecMethod method,
                             std::int64_t budget) {
  if (method == InconsecMethod::Trigger) return inconsecutivity_trigger(faults, config).triggered;
  return !is_consecutive_exact(faults, config, budget);
}

inline std::int64_t pow3(int n) {
  std::int64_t out = 1;
  for (int i = 0; i < n; ++i) out *= 3;
  return out;
}

}  // namespace detail

struct InconsecEstimate {
  std::int64_t samples = 0;
  std::int64_t hits = 0;
  double probability() const { return samples == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(samples); }
};

/// Fraction of sampled fault maps that are inconsecutive. With few cells per
/// weight the verdict for every possible fault map is computed once up front.
inline InconsecEstimate estimate_inconsec(const GroupingConfig& config, const FaultRates& rates, std::int64_t samples,
                                          InconsecMethod method, std::uint64_t seed, int threads = 1,
                                          std::int64_t budget = kDefaultEnumerationBudget) {
  validate(rates);
  if (samples < 0) throw std::invalid_argument("sample count must be non-negative");
  if (method == InconsecMethod::Exact && enumeration_cost(config) > budget) {
    throw BudgetExceeded("exact inconsecutivity needs " + std::to_string(enumeration_cost(config)) +
                         " work units per map, budget is " + std::to_string(budget));
  }
  const int cells = config.cells_per_weight();
  std::vector<char> verdict;
  if (cells <= 10 && detail::pow3(cells) <= samples) {
    verdict.resize(static_cast<std::size_t>(detail::pow3(cells)));
    std::vector<CellFault> codes(static_cast<std::size_t>(cells));
    for (std::size_t id = 0; id < verdict.size(); ++id) {
      std::size_t rest = id;
      for (auto& c : codes) {
        c = static_cast<CellFault>(rest % 3);
        rest /= 3;
      }
      verdict[id] = detail::is_inconsecutive(FaultMap::from_codes(config, codes), config, method, budget);
    }
  }

  auto partials = detail::parallel_blocks<std::int64_t>(samples, threads, [&](std::int64_t begin, std::int64_t end, std::int64_t& hits) {
    std::vector<CellFault> codes(static_cast<std::size_t>(cells));
    for (std::int64_t i = begin; i < end; ++i) {
      SampleStream stream(seed, static_cast<std::uint64_t>(i));
      std::size_t id = 0;
      std::size_t place = 1;
      for (auto& c : codes) {
        c = draw_cell(rates, stream);
        id += static_cast<std::size_t>(c) * place;
        place *= 3;
      }
      if (!verdict.empty()) {
        hits += verdict[id];
      } else {
        hits += detail::is_inconsecutive(FaultMap::from_codes(config, codes), config, method, budget);
      }
    }
  });
  InconsecEstimate out;
  out.samples = samples;
  for (auto h : partials) out.hits += h;
  return out;
}

inline double estimate_inconsec_prob(const GroupingConfig& config, const FaultRates& rates, std::int64_t samples,
                                     InconsecMethod method, std::uint64_t seed, int threads = 1,
                                     std::int64_t budget = kDefaultEnumerationBudget) {
  return estimate_inconsec(config, rates, samples, method, seed, threads, budget).probability();
}

struct SimSummary {
  std::uint64_t seed = 0;
  std::int64_t sample_count = 0;
  double inconsecutive_fraction = 0;  // trigger-based
  double mean_range_reduction = 0;
  double max_range_reduction = 0;
  std::int64_t l1_total = 0;
  double l1_mean = 0;
  std::int64_t l1_max = 0;
  std::map<Weight, std::int64_t> residual_histogram;  // |residual| -> count
  std::map<std::string, std::int64_t> layer_l1;
};

/// Distribution of (ideal width - faulty width) / ideal width over sampled maps.
inline SimSummary range_reduction_stats(const GroupingConfig& config, const FaultRates& rates, std::int64_t samples,
                                        std::uint64_t seed, int threads = 1) {
  validate(rates);
  // Lost width is summed as an integer so the mean does not depend on how
  // samples were split across threads.
  struct Partial {
    std::int64_t lost = 0;
    double max = 0;
    std::int64_t triggered = 0;
  };
  auto partials = detail::parallel_blocks<Partial>(samples, threads, [&](std::int64_t begin, std::int64_t end, Partial& p) {
    for (std::int64_t i = begin; i < end; ++i) {
      SampleStream stream(seed, static_cast<std::uint64_t>(i));
      const FaultMap faults = sample_faultmap(config, rates, stream);
      const RangeInfo range = representable_range(faults, config);
      p.lost += range.ideal_width() - range.width();
      p.max = std::max(p.max, range.reduction());
      p.triggered += inconsecutivity_trigger(faults, config).triggered;
    }
  });
  SimSummary out;
  out.seed = seed;
  out.sample_count = samples;
  std::int64_t lost = 0;
  std::int64_t triggered = 0;
  for (const auto& p : partials) {
    lost += p.lost;
    out.max_range_reduction = std::max(out.max_range_reduction, p.max);
    triggered += p.triggered;
  }
  if (samples > 0) {
    out.mean_range_reduction = static_cast<double>(lost) / static_cast<double>(config.ideal_width()) /
                               static_cast<double>(samples);
    out.inconsecutive_fraction = static_cast<double>(triggered) / static_cast<double>(samples);
  }
  return out;
}

struct SingleFaultImpact {
  bool negative = false;
  int k = 0;  // significance position, 0 = MSB
  int j = 0;
  CellFault fault = CellFault::Free;
  RangeInfo range;
};

/// Every single-cell fault (each cell, each polarity) and its range impact.
inline std::vector<SingleFaultImpact> single_fault_sweep(const GroupingConfig& config) {
  std::vector<SingleFaultImpact> out;
  for (bool negative : {false, true}) {
    for (int k = 0; k < config.columns(); ++k) {
      for (int j = 0; j < config.rows(); ++j) {
        for (CellFault f : {CellFault::SA0, CellFault::SA1}) {
          FaultMap faults(config);
          (negative ? faults.neg : faults.pos).set(k, j, f);
          out.push_back({negative, k, j, f, representable_range(faults, config)});
        }
      }
    }
  }
  return out;
}

/// Compiles the batch and reports residual l1 statistics, optionally per layer.
inline SimSummary distortion_report(std::span<const Weight> weights, std::span<const FaultMap> faults,
                                    const GroupingConfig& config, const CompilePolicy& policy,
                                    std::span<const std::string> layer_tags = {}) {
  if (!layer_tags.empty() && layer_tags.size() != weights.size()) {
    throw std::invalid_argument("layer tags must align with weights");
  }
  Compiler compiler(config, policy);
  const CompileReport report = compiler.compile_tensor(weights, faults);
  SimSummary out;
  out.sample_count = static_cast<std::int64_t>(weights.size());
  out.l1_total = report.l1;
  out.residual_histogram = report.histogram;
  for (std::size_t i = 0; i < report.weights.size(); ++i) {
    const Weight r = report.weights[i].residual;
    const Weight mag = r < 0 ? -r : r;
    out.l1_max = std::max(out.l1_max, mag);
    if (!layer_tags.empty()) out.layer_l1[layer_tags[i]] += mag;
  }
  if (!weights.empty()) out.l1_mean = static_cast<double>(out.l1_total) / static_cast<double>(weights.size());
  return out;
}

}  // namespace hgc

// R1C4 vs R2C2 at L=4: levels, single-fault range loss, inconsecutivity
// probability and compiled l1 distortion on the same random weights.
//
//   demo_grouping_compare [weights] [seed]

#include <hgc/hgc.hpp>

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <random>
#include <vector>

int main(int argc, char** argv) {
  const std::int64_t n = argc > 1 ? std::atoll(argv[1]) : 100000;
  const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;
  const hgc::FaultRates rates = hgc::kReferenceRates;

  // Laplace-ish weights in [-1, 1], scaled to each layout's range below.
  std::mt19937_64 gen(seed);
  std::exponential_distribution<double> mag(6.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> real(static_cast<std::size_t>(n));
  for (auto& x : real) x = std::min(1.0, mag(gen)) * (sign(gen) ? 1 : -1);

  std::cout << std::fixed << std::setprecision(4);
  for (auto [c, r] : {std::pair{4, 1}, std::pair{2, 2}}) {
    const hgc::GroupingConfig config(c, r, 4);
    std::cout << hgc::format_layout(config) << "\n";
    std::cout << "  levels per side     " << hgc::level_count(config) << "\n";

    hgc::FaultMap one(config);
    one.pos.set(0, 0, hgc::CellFault::SA1);
    std::cout << "  MSB SA1 range loss  " << hgc::representable_range(one, config).reduction() << "\n";

    const auto p = hgc::estimate_inconsec_prob(config, rates, 1000000, hgc::InconsecMethod::Exact, seed);
    std::cout << "  P(inconsecutive)    " << 100 * p << " %\n";

    std::vector<hgc::Weight> weights;
    std::vector<hgc::FaultMap> maps;
    for (std::int64_t i = 0; i < n; ++i) {
      weights.push_back(std::llround(real[static_cast<std::size_t>(i)] * static_cast<double>(config.ideal_max())));
      hgc::SampleStream stream(seed, static_cast<std::uint64_t>(i));
      maps.push_back(hgc::sample_faultmap(config, rates, stream));
    }
    hgc::CompilePolicy policy;
    policy.thread_count = 4;
    const auto report = hgc::compile_tensor(weights, maps, config, policy);
    const double cvm = static_cast<double>(report.count(hgc::SolvePath::TableCvm) + report.count(hgc::SolvePath::IlpCvm));
    std::cout << "  normalized l1       " << static_cast<double>(report.l1) / static_cast<double>(config.ideal_max())
              << "\n";
    std::cout << "  CVM fraction        " << cvm / static_cast<double>(n) << "\n";
  }
  return 0;
}

// Compile a single weight onto a faulty R1C4 group and compare with the naive
// sign-magnitude write.
//
//   demo_compile_one [weight]

#include <hgc/hgc.hpp>

#include <cstdlib>
#include <iostream>

namespace {

void print_side(const char* name, const hgc::Bitmap& b) {
  std::cout << "  " << name << " [";
  for (std::size_t i = 0; i < b.flat().size(); ++i) std::cout << (i ? " " : "") << b.flat()[i];
  std::cout << "]\n";
}

}  // namespace

int main(int argc, char** argv) {
  const hgc::Weight w = argc > 1 ? std::atoll(argv[1]) : 52;
  const hgc::GroupingConfig config(4, 1, 4);

  // SA0 on the MSB cell, SA1 on the value-4 cell of the positive side.
  hgc::FaultMap faults(config);
  faults.pos.set(0, 0, hgc::CellFault::SA0);
  faults.pos.set(2, 0, hgc::CellFault::SA1);

  const auto [pos, neg] = hgc::naive_encode(w, config);
  std::cout << "naive write of " << w << ":\n";
  print_side("pos", pos);
  print_side("neg", neg);
  std::cout << "  realized " << hgc::realized_weight(pos, neg, faults, config) << "\n";

  const auto range = hgc::representable_range(faults, config);
  std::cout << "representable range [" << range.min_value << ", " << range.max_value << "]\n";

  const auto cw = hgc::compile_weight(w, faults, config);
  std::cout << "compiled via " << hgc::to_string(cw.path) << ":\n";
  print_side("pos", cw.pos);
  print_side("neg", cw.neg);
  std::cout << "  realized " << cw.realized << ", residual " << cw.residual << ", cell sum " << cw.cell_sum() << "\n";
  return 0;
}

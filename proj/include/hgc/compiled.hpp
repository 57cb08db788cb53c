#pragma once

#include <hgc/core.hpp>

#include <array>
#include <optional>
#include <string_view>

namespace hgc {

enum class SolvePath { Clamp, TableFawd, IlpFawd, TableCvm, IlpCvm };

inline constexpr std::array<SolvePath, 5> kAllPaths = {SolvePath::Clamp, SolvePath::TableFawd, SolvePath::IlpFawd,
                                                      SolvePath::TableCvm, SolvePath::IlpCvm};

inline std::string_view to_string(SolvePath p) {
  switch (p) {
    case SolvePath::Clamp: return "Clamp";
    case SolvePath::TableFawd: return "TableFawd";
    case SolvePath::IlpFawd: return "IlpFawd";
    case SolvePath::TableCvm: return "TableCvm";
    case SolvePath::IlpCvm: return "IlpCvm";
  }
  return "?";
}

inline std::optional<SolvePath> parse_path(std::string_view s) {
  for (SolvePath p : kAllPaths) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

inline bool is_cvm(SolvePath p) { return p == SolvePath::TableCvm || p == SolvePath::IlpCvm; }
inline bool is_fawd(SolvePath p) { return p == SolvePath::TableFawd || p == SolvePath::IlpFawd; }

/// A solved bitmap pair for one weight. Stuck cells are always 0 in pos/neg.
struct CompiledWeight {
  Bitmap pos;
  Bitmap neg;
  Weight realized = 0;
  Weight residual = 0;  // target - realized
  SolvePath path = SolvePath::Clamp;

  std::int64_t cell_sum() const { return pos.cell_sum() + neg.cell_sum(); }

  friend bool operator==(const CompiledWeight&, const CompiledWeight&) = default;
};

}  // namespace hgc

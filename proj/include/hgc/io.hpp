#pragma once

// Layout tokens and the JSON file formats used by the command-line tool.
//
// Every per-weight cell sequence uses one ordering: positive side then
// negative side, each significance-major (MSB first) then row index.
//
//   weights: {"layout": "R2C2", "levels": 4, "shape": [..], "weights": [..],
//             "layers": [..]?, "bits": n?}
//   faults:  {"layout": "R2C2", "levels": 4, "count": N, "codes": [..]}
//            codes: 2*c*r per weight, 0 = free, 1 = SA0, 2 = SA1
//   output:  {"layout", "levels", "count", "weights": [{"pos", "neg",
//             "realized", "residual", "path"}], "summary": {...}}

#include <hgc/compiled.hpp>
#include <hgc/core.hpp>
#include <hgc/pipeline.hpp>

#include <json.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hgc {

/// Unreadable or structurally invalid input.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed inputs that disagree with each other or with the requested layout.
struct MismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Layout {
  int rows = 1;
  int columns = 1;

  friend bool operator==(const Layout&, const Layout&) = default;
};

/// Parses "R{r}C{c}".
inline Layout parse_layout(std::string_view token) {
  const auto fail = [&] { return FormatError("layout must look like R{rows}C{columns}, got '" + std::string(token) + "'"); };
  if (token.size() < 4 || (token[0] != 'R' && token[0] != 'r')) throw fail();
  const auto c_pos = token.find_first_of("Cc", 1);
  if (c_pos == std::string_view::npos) throw fail();
  Layout out;
  const auto parse_int = [&](std::string_view s, int& v) {
    if (s.empty()) throw fail();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) throw fail();
  };
  parse_int(token.substr(1, c_pos - 1), out.rows);
  parse_int(token.substr(c_pos + 1), out.columns);
  return out;
}

inline std::string format_layout(const Layout& layout) {
  return "R" + std::to_string(layout.rows) + "C" + std::to_string(layout.columns);
}

inline std::string format_layout(const GroupingConfig& config) { return format_layout({config.rows(), config.columns()}); }

inline GroupingConfig make_config(const Layout& layout, int levels) {
  return GroupingConfig(layout.columns, layout.rows, levels);
}

using nlohmann::ordered_json;

namespace detail {

inline ordered_json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

template <typename T>
T field(const ordered_json& doc, const char* key, const std::string& path) {
  if (!doc.is_object() || !doc.contains(key)) throw FormatError(path + ": missing field '" + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(path + ": field '" + key + "' has the wrong type");
  }
}

inline GroupingConfig header_config(const ordered_json& doc, const std::string& path) {
  const Layout layout = parse_layout(field<std::string>(doc, "layout", path));
  const int levels = field<int>(doc, "levels", path);
  try {
    return make_config(layout, levels);
  } catch (const ConfigError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path);
  out << text;
  if (!out) throw FormatError("failed writing " + path);
}

}  // namespace detail

struct WeightFile {
  GroupingConfig config;
  std::vector<std::int64_t> shape;
  std::vector<Weight> weights;
  std::vector<std::string> layers;  // empty or one tag per weight
  std::optional<int> bits;
};

struct FaultFile {
  GroupingConfig config;
  std::vector<FaultMap> maps;
};

inline WeightFile parse_weight_file(const ordered_json& doc, const std::string& path = "weights") {
  WeightFile out{detail::header_config(doc, path), {}, {}, {}, std::nullopt};
  out.weights = detail::field<std::vector<Weight>>(doc, "weights", path);
  if (doc.contains("shape")) {
    out.shape = detail::field<std::vector<std::int64_t>>(doc, "shape", path);
    std::int64_t n = 1;
    for (auto d : out.shape) {
      if (d < 0) throw FormatError(path + ": negative shape dimension");
      n *= d;
    }
    if (n != static_cast<std::int64_t>(out.weights.size())) {
      throw FormatError(path + ": shape holds " + std::to_string(n) + " weights, list has " +
                        std::to_string(out.weights.size()));
    }
  } else {
    out.shape = {static_cast<std::int64_t>(out.weights.size())};
  }
  if (doc.contains("layers")) {
    out.layers = detail::field<std::vector<std::string>>(doc, "layers", path);
    if (out.layers.size() != out.weights.size()) throw FormatError(path + ": one layer tag per weight required");
  }
  if (doc.contains("bits")) {
    const int bits = detail::field<int>(doc, "bits", path);
    if (bits < 1 || bits > 63) throw FormatError(path + ": bits must be in [1, 63]");
    out.bits = bits;
    const Weight hi = (Weight{1} << (bits - 1)) - 1;
    const Weight lo = -(Weight{1} << (bits - 1));
    for (Weight w : out.weights) {
      if (w < lo || w > hi) throw FormatError(path + ": weight " + std::to_string(w) + " exceeds declared bit width");
    }
  }
  return out;
}

inline WeightFile read_weight_file(const std::string& path) { return parse_weight_file(detail::read_json(path), path); }

inline FaultFile parse_fault_file(const ordered_json& doc, const std::string& path = "faults") {
  FaultFile out{detail::header_config(doc, path), {}};
  const auto count = detail::field<std::int64_t>(doc, "count", path);
  const auto codes = detail::field<std::vector<int>>(doc, "codes", path);
  const auto per = static_cast<std::size_t>(out.config.cells_per_weight());
  if (count < 0 || codes.size() != static_cast<std::size_t>(count) * per) {
    throw FormatError(path + ": expected count * 2*c*r = " + std::to_string(count) + " * " + std::to_string(per) +
                      " codes, found " + std::to_string(codes.size()));
  }
  out.maps.reserve(static_cast<std::size_t>(count));
  std::vector<CellFault> cells(per);
  for (std::size_t w = 0; w < static_cast<std::size_t>(count); ++w) {
    for (std::size_t i = 0; i < per; ++i) {
      const int code = codes[w * per + i];
      if (code < 0 || code > 2) throw FormatError(path + ": fault code " + std::to_string(code) + " not in {0,1,2}");
      cells[i] = static_cast<CellFault>(code);
    }
    out.maps.push_back(FaultMap::from_codes(out.config, cells));
  }
  return out;
}

inline FaultFile read_fault_file(const std::string& path) { return parse_fault_file(detail::read_json(path), path); }

inline ordered_json fault_file_json(const GroupingConfig& config, const std::vector<FaultMap>& maps) {
  ordered_json doc;
  doc["layout"] = format_layout(config);
  doc["levels"] = config.levels();
  doc["count"] = maps.size();
  std::vector<int> codes;
  codes.reserve(maps.size() * static_cast<std::size_t>(config.cells_per_weight()));
  for (const auto& m : maps) {
    for (CellFault f : m.codes()) codes.push_back(static_cast<int>(f));
  }
  doc["codes"] = std::move(codes);
  return doc;
}

inline ordered_json weight_file_json(const GroupingConfig& config, const std::vector<Weight>& weights,
                                     const std::vector<std::string>& layers = {}) {
  ordered_json doc;
  doc["layout"] = format_layout(config);
  doc["levels"] = config.levels();
  doc["shape"] = std::vector<std::int64_t>{static_cast<std::int64_t>(weights.size())};
  doc["weights"] = weights;
  if (!layers.empty()) doc["layers"] = layers;
  return doc;
}

/// Summary block in a fixed key order; timings are left out so files stay
/// byte-identical across runs.
inline ordered_json summary_json(const CompileReport& report) {
  ordered_json s;
  s["count"] = report.weights.size();
  s["l1"] = report.l1;
  ordered_json paths;
  for (SolvePath p : kAllPaths) paths[std::string(to_string(p))] = report.count(p);
  s["paths"] = std::move(paths);
  ordered_json hist = ordered_json::array();
  for (const auto& [mag, n] : report.histogram) hist.push_back({mag, n});
  s["histogram"] = std::move(hist);
  return s;
}

inline ordered_json output_json(const GroupingConfig& config, const CompileReport& report) {
  ordered_json doc;
  doc["layout"] = format_layout(config);
  doc["levels"] = config.levels();
  doc["count"] = report.weights.size();
  ordered_json list = ordered_json::array();
  for (const auto& cw : report.weights) {
    ordered_json e;
    e["pos"] = std::vector<CellValue>(cw.pos.flat().begin(), cw.pos.flat().end());
    e["neg"] = std::vector<CellValue>(cw.neg.flat().begin(), cw.neg.flat().end());
    e["realized"] = cw.realized;
    e["residual"] = cw.residual;
    e["path"] = std::string(to_string(cw.path));
    list.push_back(std::move(e));
  }
  doc["weights"] = std::move(list);
  doc["summary"] = summary_json(report);
  return doc;
}

struct OutputEntry {
  Bitmap pos;
  Bitmap neg;
  Weight realized = 0;
  Weight residual = 0;
  SolvePath path = SolvePath::Clamp;
};

struct OutputFile {
  GroupingConfig config;
  std::vector<OutputEntry> entries;
};

inline OutputFile parse_output_file(const ordered_json& doc, const std::string& path = "output") {
  OutputFile out{detail::header_config(doc, path), {}};
  const auto& list = doc.at("weights");
  for (const auto& e : list) {
    try {
      auto p = parse_path(e.at("path").get<std::string>());
      if (!p) throw FormatError(path + ": unknown path name");
      out.entries.push_back({Bitmap(out.config, e.at("pos").get<std::vector<CellValue>>()),
                             Bitmap(out.config, e.at("neg").get<std::vector<CellValue>>()),
                             e.at("realized").get<Weight>(), e.at("residual").get<Weight>(), *p});
    } catch (const nlohmann::json::exception& ex) {
      throw FormatError(path + ": " + ex.what());
    } catch (const ShapeError& ex) {
      throw FormatError(path + ": " + ex.what());
    }
  }
  return out;
}

inline OutputFile read_output_file(const std::string& path) { return parse_output_file(detail::read_json(path), path); }

inline void write_json(const std::string& path, const ordered_json& doc) { detail::write_text(path, doc.dump() + "\n"); }

}  // namespace hgc

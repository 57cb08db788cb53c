// hgc: compile signed integer weights onto faulty hybrid-grouped cell groups,
// generate fault maps, and inspect range/consecutivity properties.
//
// Exit codes: 0 success, 2 malformed input or arguments, 3 layout/shape
// mismatch between inputs, 4 enumeration budget exceeded.

#include <hgc/hgc.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitMalformed = 2;
constexpr int kExitMismatch = 3;
constexpr int kExitBudget = 4;

struct LayoutArgs {
  std::string layout;
  int levels = 0;

  hgc::GroupingConfig config() const { return hgc::make_config(hgc::parse_layout(layout), levels); }
};

void add_layout(CLI::App* cmd, LayoutArgs& args) {
  cmd->add_option("--layout", args.layout, "Grouping layout, e.g. R2C2")->required();
  cmd->add_option("--levels", args.levels, "Programmable levels per cell")->required();
}

void require_same_layout(const hgc::GroupingConfig& expected, const hgc::GroupingConfig& found, const std::string& what) {
  if (!(expected == found)) {
    throw hgc::MismatchError(what + " declares " + hgc::format_layout(found) + "/L=" + std::to_string(found.levels()) +
                             " but --layout/--levels ask for " + hgc::format_layout(expected) +
                             "/L=" + std::to_string(expected.levels()));
  }
}

// ---------------------------------------------------------------------------
// compile

struct CompileArgs {
  LayoutArgs layout;
  std::string weights;
  std::string faults;
  std::string out;
  int threads = 1;
  std::string force_path = "auto";
  std::uint64_t seed = 0;
};

int run_compile(const CompileArgs& args) {
  const auto config = args.layout.config();
  const auto weights = hgc::read_weight_file(args.weights);
  const auto faults = hgc::read_fault_file(args.faults);
  require_same_layout(config, weights.config, "weight file");
  require_same_layout(config, faults.config, "fault file");
  if (weights.weights.size() != faults.maps.size()) {
    throw hgc::MismatchError("weight file has " + std::to_string(weights.weights.size()) + " weights, fault file has " +
                             std::to_string(faults.maps.size()) + " fault maps");
  }

  hgc::CompilePolicy policy;
  policy.thread_count = args.threads;
  if (args.force_path == "table") {
    policy.force_path = hgc::ForcePath::Table;
  } else if (args.force_path == "ilp") {
    policy.force_path = hgc::ForcePath::Ilp;
  }

  const auto start = std::chrono::steady_clock::now();
  hgc::Compiler compiler(config, policy);
  const auto report = compiler.compile_tensor(weights.weights, faults.maps);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  hgc::write_json(args.out, hgc::output_json(config, report));

  auto summary = hgc::summary_json(report);
  summary["time_condition_s"] = report.times.condition;
  summary["time_fawd_s"] = report.times.fawd;
  summary["time_cvm_s"] = report.times.cvm;
  summary["wall_s"] = wall;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// gen-faults

struct GenArgs {
  LayoutArgs layout;
  std::int64_t count = 0;
  double p_sa0 = 0;
  double p_sa1 = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int run_gen_faults(const GenArgs& args) {
  const auto config = args.layout.config();
  const hgc::FaultRates rates{args.p_sa0, args.p_sa1};
  hgc::validate(rates);
  if (args.count < 0) throw hgc::FormatError("--count must be non-negative");
  std::vector<hgc::FaultMap> maps;
  maps.reserve(static_cast<std::size_t>(args.count));
  for (std::int64_t i = 0; i < args.count; ++i) {
    hgc::SampleStream stream(args.seed, static_cast<std::uint64_t>(i));
    maps.push_back(hgc::sample_faultmap(config, rates, stream));
  }
  hgc::write_json(args.out, hgc::fault_file_json(config, maps));
  std::cout << hgc::ordered_json{{"count", args.count}, {"out", args.out}}.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// analyze

struct MapArgs {
  std::string codes;
  std::string faults;
  std::int64_t index = 0;
  std::int64_t enum_budget = hgc::kDefaultEnumerationBudget;
};

void add_map_source(CLI::App* cmd, MapArgs& args) {
  cmd->add_option("--codes", args.codes, "2*c*r comma-separated fault codes (0 free, 1 SA0, 2 SA1)");
  cmd->add_option("--faults", args.faults, "Fault file to take the map from");
  cmd->add_option("--index", args.index, "Which map of --faults to use")->capture_default_str();
}

hgc::FaultMap load_map(const MapArgs& args, const hgc::GroupingConfig& config) {
  if (!args.faults.empty()) {
    const auto file = hgc::read_fault_file(args.faults);
    require_same_layout(config, file.config, "fault file");
    if (args.index < 0 || args.index >= static_cast<std::int64_t>(file.maps.size())) {
      throw hgc::MismatchError("--index " + std::to_string(args.index) + " outside fault file with " +
                               std::to_string(file.maps.size()) + " maps");
    }
    return file.maps[static_cast<std::size_t>(args.index)];
  }
  std::vector<hgc::CellFault> codes;
  if (!args.codes.empty()) {
    std::stringstream in(args.codes);
    std::string item;
    while (std::getline(in, item, ',')) {
      if (item != "0" && item != "1" && item != "2") throw hgc::FormatError("fault code '" + item + "' not in {0,1,2}");
      codes.push_back(static_cast<hgc::CellFault>(item[0] - '0'));
    }
  } else {
    codes.assign(static_cast<std::size_t>(config.cells_per_weight()), hgc::CellFault::Free);
  }
  if (codes.size() != static_cast<std::size_t>(config.cells_per_weight())) {
    throw hgc::MismatchError("--codes has " + std::to_string(codes.size()) + " entries, layout needs " +
                             std::to_string(config.cells_per_weight()));
  }
  return hgc::FaultMap::from_codes(config, codes);
}

hgc::ordered_json range_json(const hgc::RangeInfo& r) {
  hgc::ordered_json j;
  j["stuck_offset"] = r.stuck_offset;
  j["min_value"] = r.min_value;
  j["max_value"] = r.max_value;
  j["ideal_min"] = r.ideal_min;
  j["ideal_max"] = r.ideal_max;
  j["width"] = r.width();
  j["ideal_width"] = r.ideal_width();
  j["reduction"] = r.reduction();
  return j;
}

struct ProbArgs {
  double p_sa0 = hgc::kReferenceRates.p_sa0;
  double p_sa1 = hgc::kReferenceRates.p_sa1;
  std::int64_t samples = 1000000;
  std::string method = "exact";
  std::uint64_t seed = 0;
  int threads = 1;
  std::int64_t enum_budget = hgc::kDefaultEnumerationBudget;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fault-aware weight compiler for row-column hybrid grouped cell arrays"};
  app.require_subcommand(1);

  CompileArgs compile_args;
  auto* compile = app.add_subcommand("compile", "Compile a weight tensor against per-weight fault maps");
  add_layout(compile, compile_args.layout);
  compile->add_option("--weights", compile_args.weights, "Weight file (JSON)")->required();
  compile->add_option("--faults", compile_args.faults, "Fault file (JSON)")->required();
  compile->add_option("--out", compile_args.out, "Output file (JSON)")->required();
  compile->add_option("--threads", compile_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  compile->add_option("--force-path", compile_args.force_path, "Solver route")
      ->check(CLI::IsMember({"auto", "table", "ilp"}));
  compile->add_option("--seed", compile_args.seed, "Seed (recorded for reproducibility; compilation is deterministic)");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen-faults", "Sample per-weight fault maps");
  add_layout(gen, gen_args.layout);
  gen->add_option("--count", gen_args.count, "Number of weights")->required();
  gen->add_option("--p-sa0", gen_args.p_sa0, "SA0 probability per cell")->required();
  gen->add_option("--p-sa1", gen_args.p_sa1, "SA1 probability per cell")->required();
  gen->add_option("--seed", gen_args.seed, "Seed")->required();
  gen->add_option("--out", gen_args.out, "Output fault file")->required();

  auto* analyze = app.add_subcommand("analyze", "Range and consecutivity diagnostics");
  analyze->require_subcommand(1);

  LayoutArgs range_layout;
  MapArgs range_map;
  auto* range = analyze->add_subcommand("range", "Representable range of a fault map");
  add_layout(range, range_layout);
  add_map_source(range, range_map);

  LayoutArgs consec_layout;
  MapArgs consec_map;
  auto* consec = analyze->add_subcommand("consecutivity", "Inconsecutivity trigger and exact check");
  add_layout(consec, consec_layout);
  add_map_source(consec, consec_map);
  consec->add_option("--enum-budget", consec_map.enum_budget, "Exact enumeration budget")->capture_default_str();

  LayoutArgs prob_layout;
  ProbArgs prob_args;
  auto* prob = analyze->add_subcommand("inconsec-prob", "Monte Carlo inconsecutivity probability");
  add_layout(prob, prob_layout);
  prob->add_option("--p-sa0", prob_args.p_sa0, "SA0 probability per cell")->capture_default_str();
  prob->add_option("--p-sa1", prob_args.p_sa1, "SA1 probability per cell")->capture_default_str();
  prob->add_option("--samples", prob_args.samples, "Sampled fault maps")->capture_default_str();
  prob->add_option("--method", prob_args.method, "trigger or exact")
      ->check(CLI::IsMember({"trigger", "exact"}))
      ->capture_default_str();
  prob->add_option("--seed", prob_args.seed, "Seed")->capture_default_str();
  prob->add_option("--threads", prob_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  prob->add_option("--enum-budget", prob_args.enum_budget, "Exact enumeration budget")->capture_default_str();

  LayoutArgs levels_layout;
  auto* levels = analyze->add_subcommand("levels", "Distinct levels one side can represent");
  add_layout(levels, levels_layout);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitMalformed;
  }

  try {
    if (*compile) return run_compile(compile_args);
    if (*gen) return run_gen_faults(gen_args);
    if (*range) {
      const auto config = range_layout.config();
      const auto faults = load_map(range_map, config);
      std::cout << range_json(hgc::representable_range(faults, config)).dump(2) << "\n";
      return 0;
    }
    if (*consec) {
      const auto config = consec_layout.config();
      const auto faults = load_map(consec_map, config);
      const auto report = hgc::inconsecutivity_trigger(faults, config);
      hgc::ordered_json j;
      j["triggered"] = report.triggered;
      hgc::ordered_json entries = hgc::ordered_json::array();
      for (const auto& e : report.entries) {
        entries.push_back({{"significance", e.significance}, {"gap_stride", e.gap_stride}, {"tail_span", e.tail_span}});
      }
      j["triggering_significances"] = std::move(entries);
      const auto set = hgc::enumerate_representable_set(faults, config, consec_map.enum_budget);
      j["consecutive_exact"] = hgc::is_consecutive_exact(faults, config, consec_map.enum_budget);
      j["representable_count"] = set.size();
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*prob) {
      const auto config = prob_layout.config();
      const auto method = prob_args.method == "exact" ? hgc::InconsecMethod::Exact : hgc::InconsecMethod::Trigger;
      const auto est = hgc::estimate_inconsec(config, {prob_args.p_sa0, prob_args.p_sa1}, prob_args.samples, method,
                                              prob_args.seed, prob_args.threads, prob_args.enum_budget);
      hgc::ordered_json j;
      j["method"] = prob_args.method;
      j["samples"] = est.samples;
      j["inconsecutive"] = est.hits;
      j["probability"] = est.probability();
      j["seed"] = prob_args.seed;
      std::cout << j.dump(2) << "\n";
      return 0;
    }
    if (*levels) {
      const auto config = levels_layout.config();
      std::cout << hgc::ordered_json{{"layout", hgc::format_layout(config)}, {"levels", config.levels()},
                                     {"level_count", hgc::level_count(config)}}
                       .dump(2)
                << "\n";
      return 0;
    }
  } catch (const hgc::BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << " (raise --enum-budget)\n";
    return kExitBudget;
  } catch (const hgc::MismatchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const hgc::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
  return kExitMalformed;
}

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "labelforge/pipeline.hpp"

namespace labelforge::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kDataError = 3, kWorkerFailure = 4 };

struct RunConfig {
  std::string input;
  std::string report;
  std::string svg;
  std::size_t workers = 1;
  std::size_t iterations = 10000;
  std::size_t population = 100;
  std::uint64_t seed = 1;
  double crossover_rate = 0.5;
  double mutation_rate = 0.01;
  double ga_fraction = 0.7;
  double dde_scale = 0.5;
  std::array<double, 4> weights{10.0, 5.0, 1.0, 1.0};
  std::size_t exchange_interval = 500;
  std::optional<std::array<double, 3>> layer_radii;  // map units; unset scales with label height
  std::optional<double> epsilon;
  bool strict = false;
  InitMode init_mode = InitMode::elite;
  MutationDirection mutation_direction = MutationDirection::as_printed;
  double char_width = 1.0;
  double label_height = 1.0;
  bool record_time = false;

  // Trace: extra worker count to run next to W=1 (0 = none).
  std::size_t trace_workers = 0;
  // Bench: worker counts to compare.
  std::vector<std::size_t> bench_workers{1, 2, 4};
  std::string output;  // CSV destination for trace / bench; stdout when empty

  void validate() const;
  PipelineConfig pipeline() const;
  ReadOptions read_options() const;
};

std::string config_to_json(const RunConfig& cfg);
// Keys absent from the document keep the values already in `base`.
RunConfig config_from_json(const std::string& text, RunConfig base = {});

int cmd_place(const RunConfig& cfg, std::ostream& out);
int cmd_trace(const RunConfig& cfg, std::ostream& out);
int cmd_bench(const RunConfig& cfg, std::ostream& out);

// Full command line handling, including error to exit-code mapping.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace labelforge::cli

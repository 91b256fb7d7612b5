#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "amdi/optimizer.hpp"
#include "amdi/pipeline.hpp"

namespace amdi {

// Everything a CLI run needs. Omitted keys keep these defaults.
struct RunConfig {
  ProtocolConfig protocol;
  SourceParams params;  // operating point for `rate`, `mc-validate`; initial point for the optimizer
  double distance_km = 0.0;
  std::vector<double> distances{0, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500};
  bool baseline = true;  // sweep: also optimise the WCS baseline
  bool max_distance = true;
  std::uint64_t seed = 1;
  std::string out_path;

  ParamBounds bounds;
  OptimizerSettings optimizer;

  double compare_distance_km = 400.0;
  std::vector<double> compare_n_pulses{1e12, 1e14};

  std::uint64_t mc_pulses = 1'000'000;
  double mc_threshold = 3.0;

  void validate() const;
  OptimizationSpace space() const;
};

const char* source_name(SignalKind k);          // "hybrid" | "wcs"
SignalKind parse_source(const std::string& s);  // throws ConfigError
Fluctuation parse_fluctuation(const std::string& s);

// TOML-style document with [source], [detector], [protocol], [run],
// [optimizer], [compare] and [mc] sections. Unknown keys are errors.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

} // namespace amdi

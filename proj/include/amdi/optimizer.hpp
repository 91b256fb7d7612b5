#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "amdi/pipeline.hpp"

namespace amdi {

struct ParamBounds {
  std::array<double, SourceParams::kDim> lo{0.005, 0.005, 0.001, 1e-4, 1e-4, 1e-4, 2e-9};
  std::array<double, SourceParams::kDim> hi{1.0, 1.0, 0.5, 0.99, 0.99, 0.99, 2e-5};
  double min_p_vacuum = 1e-4;
  bool signal_at_least_nu = false;  // optional coupling mu >= nu

  bool contains(const SourceParams& p) const;
};

struct OptimizerSettings {
  int starts = 8;
  int max_evals = 2000;      // per start
  double tolerance = 1e-6;   // simplex diameter in transformed space
  bool verbose = false;      // progress on stderr
};

struct OptimizationSpace {
  ProtocolConfig protocol;
  ParamBounds bounds;
  SourceParams initial;  // start 0 when no warm start is supplied
  OptimizerSettings settings;
};

struct OptimizationResult {
  double distance_km = 0.0;
  SourceParams params;
  KeyRateReport report;
  int evaluations = 0;
};

// Nelder-Mead on an unconstrained vector; minimises `f`. Deterministic.
// The budget is checked once per iteration, so a final shrink may exceed
// it by up to n evaluations.
struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double step, int max_evals, double tolerance);

// Map between the constrained parameters and the unconstrained search
// coordinates (log intensities, softmax probabilities, log Tc).
std::vector<double> encode_params(const SourceParams& p);
SourceParams decode_params(const std::vector<double>& x, const ParamBounds& bounds);

OptimizationResult optimize_at_distance(const OptimizationSpace& space, double distance_km,
                                        std::uint64_t seed,
                                        const std::optional<SourceParams>& warm_start = std::nullopt);

struct SweepResult {
  std::vector<OptimizationResult> points;
  // Largest distance with a positive optimised rate, to 1 km; NaN if the
  // rate is zero already at the first grid point.
  double max_distance_km = 0.0;
};

// Warm-started sweep; when `find_max_distance` is set the maximal distance
// is located by bisection.
SweepResult sweep(const OptimizationSpace& space, const std::vector<double>& distances, std::uint64_t seed,
                  bool find_max_distance = true);

// Bisection on the optimised rate between a positive and a zero point.
double max_distance(const OptimizationSpace& space, std::uint64_t seed, double lo_km,
                    const SourceParams& lo_params, double hi_km);

} // namespace amdi

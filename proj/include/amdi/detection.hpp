#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "amdi/sources.hpp"

namespace amdi {

inline constexpr std::size_t kDefaultQuadraturePoints = 2048;

// Symmetric channel: both arms together span `distance_km`, and the
// per-arm transmittance includes the detector efficiency.
struct DetectorModel {
  double eta_d = 0.8;
  double p_d = 1e-8;
  double alpha_db_per_km = 0.16;
  double distance_km = 0.0;

  double eta() const;
  void validate() const;
};

double transmittance(const DetectorModel& model);

struct ClickPair {
  double left = 0.0;
  double right = 0.0;
  double total() const { return left + right; }
};

// Only-left / only-right click probabilities for coherent pulses of
// intensities k_a, k_b with relative phase theta.
ClickPair click_probs_theta(double k_a, double k_b, double theta, const DetectorModel& model);

// Phase-averaged single-click gain for two phase-randomised coherent pulses.
double gain_wcs(double k_a, double k_b, const DetectorModel& model);

// I0(x) - 1 without cancellation near x = 0.
double bessel_i0_minus_one(double x);

// Periodic trapezoid rule: (1/2pi) * integral of f over [0, 2pi).
template <class F>
double phase_average(F&& f, std::size_t points = kDefaultQuadraturePoints) {
  double acc = 0.0;
  const double h = 2.0 * std::numbers::pi / static_cast<double>(points);
  for (std::size_t k = 0; k < points; ++k) acc += f(h * static_cast<double>(k));
  return acc / static_cast<double>(points);
}

struct FockOutcome {
  std::size_t p_left = 0;
  double prob = 0.0;
};

// Output photon-number distribution of |i>_A |j>_B after the balanced
// beamsplitter, indexed by the number of photons leaving on the left port.
std::vector<FockOutcome> fock_interference_distribution(long i, long j);

// Memoised P_{i,j}(p) for all i, j <= cutoff. Immutable once built.
class BeamsplitterTable {
public:
  explicit BeamsplitterTable(std::size_t cutoff);

  std::size_t cutoff() const { return cutoff_; }
  // Probabilities for p = 0 .. i + j.
  const double* row(std::size_t i, std::size_t j) const {
    return data_.data() + offsets_[i * (cutoff_ + 1) + j];
  }

  // Process-wide table covering at least `cutoff`; built once, thread-safe.
  static const BeamsplitterTable& shared(std::size_t cutoff = kDefaultPhotonCutoff);

private:
  std::size_t cutoff_;
  std::vector<std::size_t> offsets_;
  std::vector<double> data_;
};

struct FockYield {
  double left = 0.0;
  double right = 0.0;
  double total() const { return left + right; }
};

FockYield fock_yields(std::size_t i, std::size_t j, const DetectorModel& model);

// Y_L + Y_R for every (i, j) up to a cutoff at one transmittance.
class YieldTable {
public:
  // OpenMP over rows of i.
  YieldTable(const DetectorModel& model, std::size_t cutoff = kDefaultPhotonCutoff);

  // Single-threaded reference build; identical results.
  static YieldTable build_serial(const DetectorModel& model,
                                 std::size_t cutoff = kDefaultPhotonCutoff);

  std::size_t cutoff() const { return cutoff_; }
  const FockYield& at(std::size_t i, std::size_t j) const { return yields_[i * (cutoff_ + 1) + j]; }

private:
  struct SerialTag {};
  YieldTable(const DetectorModel& model, std::size_t cutoff, SerialTag);
  void fill_row(std::size_t i, const std::vector<double>& silent,
                const std::vector<double>& fire, const BeamsplitterTable& bs);

  std::size_t cutoff_;
  std::vector<FockYield> yields_;
};

struct GainResult {
  double value = 0.0;
  // Upper bound on the gain mass lost to photon-number truncation.
  double truncation_bound = 0.0;
};

GainResult gain_generic(const PhotonNumberDistribution& pnd_a, const PhotonNumberDistribution& pnd_b,
                        const DetectorModel& model);
GainResult gain_generic(const PhotonNumberDistribution& pnd_a, const PhotonNumberDistribution& pnd_b,
                        const YieldTable& table);

} // namespace amdi

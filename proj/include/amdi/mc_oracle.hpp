#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "amdi/pairing.hpp"

namespace amdi {

inline constexpr std::uint64_t kMcMinSamples = 10000;
inline constexpr std::uint64_t kMcShardPulses = 1u << 18;

enum class ClickOutcome : std::uint8_t { None, Left, Right, Both };

// One simulated time bin.
struct PulseEvent {
  std::uint64_t n = 0;
  Level k_a = Level::Vacuum;
  Level k_b = Level::Vacuum;
  double theta_a = 0.0;
  double theta_b = 0.0;
  int r_a = 0;
  int r_b = 0;
  ClickOutcome click = ClickOutcome::None;
};

struct EmpiricalStats {
  std::uint64_t sample_size = 0;
  std::uint64_t clicks = 0;           // single-detector clicks
  std::uint64_t filtered_clicks = 0;  // clicks surviving click filtering
  std::uint64_t pairs = 0;            // all pairs formed inside the window
  std::uint64_t retained_pairs = 0;   // pairs not discarded by the pairing rules
  std::map<Category, std::uint64_t> category_counts;  // every formed pair
  std::uint64_t z_pairs = 0;
  std::uint64_t z_errors = 0;
  std::uint64_t window_slots = 0;
  double rep_rate_hz = 0.0;
  double gap_sum = 0.0;    // slots
  double gap_sumsq = 0.0;  // slots^2
  std::vector<std::uint64_t> gap_histogram;  // equal-width bins over [1, window]

  double click_rate() const;
  double click_rate_se() const;
  double pair_rate() const;
  double pair_rate_se() const;
  double category_fraction(const Category& c) const;
  double category_fraction_se(const Category& c) const;
  double mean_pair_time() const;  // seconds
  double mean_pair_time_se() const;
  double z_error_fraction() const;
  double z_error_fraction_se() const;

  bool operator==(const EmpiricalStats&) const = default;
};

struct McOptions {
  std::size_t photon_cutoff = kDefaultPhotonCutoff;
  std::size_t histogram_bins = 32;
};

// Single-click events of one shard; the stream depends only on (seed, shard).
std::vector<PulseEvent> simulate_shard(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                                       std::uint64_t first_pulse, std::uint64_t count, std::uint64_t seed,
                                       std::uint64_t shard, const McOptions& opt = {});

// Sharded OpenMP simulation; identical output for any thread count.
EmpiricalStats simulate(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                        const ProtocolTiming& timing, std::uint64_t sample_size, std::uint64_t seed,
                        const McOptions& opt = {});

// Single-threaded reference with the same streams.
EmpiricalStats simulate_serial(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                               const ProtocolTiming& timing, std::uint64_t sample_size, std::uint64_t seed,
                               const McOptions& opt = {});

struct ZScore {
  std::string statistic;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ZScore> entries;
  double threshold = 3.0;
  bool all_pass() const;
};

// Per-statistic z-scores of the empirical sample against the analytic
// prediction: click rate, pair rate, category fractions (all categories with
// at least 10 expected pairs), mean pair time, Z error fraction.
ComparisonReport compare(const PairingInputs& inputs, const PairingStatistics& analytic,
                         const EmpiricalStats& empirical, double threshold = 3.0);

} // namespace amdi

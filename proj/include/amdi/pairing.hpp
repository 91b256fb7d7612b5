#pragma once

#include <array>
#include <compare>
#include <map>
#include <string>

#include "amdi/detection.hpp"
#include "amdi/sources.hpp"

namespace amdi {

// Intensity setting of one party in one time bin.
enum class Level : int { Signal = 0, Nu = 1, Omega = 2, Vacuum = 3 };
inline constexpr std::array<Level, 4> kLevels{Level::Signal, Level::Nu, Level::Omega, Level::Vacuum};

const char* level_name(Level k);
double level_intensity(const SourceSpec& spec, Level k);
double level_prob(const SourceSpec& spec, Level k);

// Click filtering: signal against a nu/omega decoy, and nu against omega,
// are dropped before pairing.
bool is_filtered(Level a, Level b);

// Single-click gain q(k_a, k_b) for every intensity combination.
struct GainTable {
  std::array<std::array<double, 4>, 4> q{};
  double truncation_bound = 0.0;

  double operator()(Level a, Level b) const {
    return q[static_cast<int>(a)][static_cast<int>(b)];
  }
};

GainTable build_gain_table(const SourceSpec& spec_a, const SourceSpec& spec_b,
                           const DetectorModel& model, std::size_t cutoff = kDefaultPhotonCutoff);

struct ProtocolTiming {
  double rep_rate_hz = 1e9;
  double tc_seconds = 0.315e-6;
  double n_pulses = 1e12;

  // Pulses inside one pairing window.
  double window_slots() const { return rep_rate_hz * tc_seconds; }
  void validate() const;
};

// Levels a party used in the two paired bins, order-free.
struct BinPair {
  Level first = Level::Vacuum;
  Level second = Level::Vacuum;

  BinPair() = default;
  BinPair(Level x, Level y);
  bool operator==(const BinPair&) const = default;
  auto operator<=>(const BinPair&) const = default;
};

struct Category {
  BinPair alice;
  BinPair bob;

  bool operator==(const Category&) const = default;
  auto operator<=>(const Category&) const = default;
  // e.g. "[xi+o,xi+o]", "[2w,o]"
  std::string label() const;
  // Pairings with signal+signal or signal+decoy on one side are discarded.
  bool retained() const;
};

// Named categories used by parameter estimation.
namespace cat {
Category signal_signal();  // [xi+o, xi+o]: Z-basis raw key
Category vac_signal();     // [o, xi+o]
Category signal_vac();     // [xi+o, o]
Category nu_nu();
Category omega_omega();
Category vac_nu();
Category nu_vac();
Category vac_omega();
Category omega_vac();
Category vac_vac();
Category vac_2omega();     // [o, w+w]
Category two_omega_vac();  // [w+w, o]
Category two_omega_two_omega();
} // namespace cat

// Filter survival probability of one bin.
double filter_survival(const SourceSpec& spec_a, const SourceSpec& spec_b);

// Send-probability weight of a category, normalised by filter survival.
double category_probability(const SourceSpec& spec_a, const SourceSpec& spec_b, const Category& c);

// Phase-matched X-basis weight (2/M)(p_w p_w / p_s)^2.
double x_category_probability(const SourceSpec& spec_a, const SourceSpec& spec_b, int phase_slices);

double q_total(const SourceSpec& spec_a, const SourceSpec& spec_b, const GainTable& gains);
double q_window(double q_tot, const ProtocolTiming& timing);
double total_pairs(const ProtocolTiming& timing, double q_tot, double q_tc);
double mean_pair_time(const ProtocolTiming& timing, double q_tot);

// Expected pairs of one category.
double pair_count(const SourceSpec& spec_a, const SourceSpec& spec_b, const GainTable& gains,
                  double q_tot, double n_tot, const Category& c);

std::map<Category, double> pair_counts(const SourceSpec& spec_a, const SourceSpec& spec_b,
                                       const GainTable& gains, double q_tot, double n_tot);

struct XBasisSettings {
  int phase_slices = 16;
  double e_hom = 0.04;
  double delta_drift = 0.0;
  std::size_t quadrature_points = kDefaultQuadraturePoints;
};

double x_pair_count(const SourceSpec& spec_a, const SourceSpec& spec_b, const DetectorModel& model,
                    double q_tot, double n_tot, const XBasisSettings& x);
double x_error_count(const SourceSpec& spec_a, const SourceSpec& spec_b, const DetectorModel& model,
                     double q_tot, double n_tot, const XBasisSettings& x);

struct ZCounts {
  double n_z = 0.0;
  double m_z = 0.0;
};

ZCounts z_counts(const SourceSpec& spec_a, const SourceSpec& spec_b, const GainTable& gains,
                 double q_tot, double n_tot);

struct PairingInputs {
  SourceSpec alice;
  SourceSpec bob;
  DetectorModel detector;
  ProtocolTiming timing;
  int phase_slices = 16;
  double e_hom = 0.04;
  double omega_fib = 5900.0;  // rad/s
  double delta_nu = 0.0;      // Hz
  std::size_t quadrature_points = kDefaultQuadraturePoints;
  std::size_t photon_cutoff = kDefaultPhotonCutoff;
};

struct PairingStatistics {
  double q_tot = 0.0;
  double q_tc = 0.0;
  double n_tot = 0.0;
  double t_mean = 0.0;
  double delta_drift = 0.0;
  std::map<Category, double> n_counts;
  double n_x = 0.0;
  double m_x = 0.0;
  double n_z = 0.0;
  double m_z = 0.0;
  GainTable gains;
};

PairingStatistics compute_pairing_statistics(const PairingInputs& in);
PairingStatistics compute_pairing_statistics(const PairingInputs& in, const GainTable& gains);

} // namespace amdi

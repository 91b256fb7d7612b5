#pragma once

#include <array>

#include "amdi/finite_key.hpp"
#include "amdi/key_rate.hpp"
#include "amdi/pairing.hpp"

namespace amdi {

// Everything fixed during an optimisation: channel, detectors, protocol
// constants and security parameters.
struct ProtocolConfig {
  SignalKind signal_kind = SignalKind::Cat;
  double purity = 1.0;
  double eta_d = 0.8;
  double p_d = 1e-8;
  double alpha_db_per_km = 0.16;
  double f_ec = 1.1;
  double epsilon = 1e-10;
  double n_pulses = 1e12;
  double rep_rate_hz = 1e9;
  int phase_slices = 16;
  double e_hom = 0.04;
  double omega_fib = 5900.0;
  double delta_nu = 0.0;
  Fluctuation fluctuation = Fluctuation::PerTerm;
  bool x_observed_conversion = false;
  std::size_t photon_cutoff = kDefaultPhotonCutoff;
  std::size_t quadrature_points = kDefaultQuadraturePoints;

  void validate() const;
};

// The free parameters of one operating point (both parties identical).
struct SourceParams {
  double mu = 0.088;
  double nu = 0.087;
  double omega = 0.036;
  double p_signal = 0.333;
  double p_nu = 0.007;
  double p_omega = 0.038;
  double tc_seconds = 0.315e-6;

  static constexpr std::size_t kDim = 7;
  std::array<double, kDim> as_array() const { return {mu, nu, omega, p_signal, p_nu, p_omega, tc_seconds}; }
  static SourceParams from_array(const std::array<double, kDim>& v);
};

SourceSpec make_source(const ProtocolConfig& cfg, const SourceParams& params);
DetectorModel make_detector(const ProtocolConfig& cfg, double distance_km);
ProtocolTiming make_timing(const ProtocolConfig& cfg, const SourceParams& params);
PairingInputs make_pairing_inputs(const ProtocolConfig& cfg, const SourceParams& params, double distance_km);

// Full chain: gains, pairing statistics, decoy bounds, key rate.
// Throws ConfigError on invalid inputs; estimation failures give rate 0
// with a diagnostic.
KeyRateReport evaluate_key_rate(const ProtocolConfig& cfg, const SourceParams& params, double distance_km);

} // namespace amdi

#pragma once

#include <string>

#include "amdi/finite_key.hpp"
#include "amdi/pairing.hpp"

namespace amdi {

double binary_entropy(double x);

// Bits leaked during error correction: n_z f H2(m_z / n_z).
double lambda_ec(double n_z, double m_z, double f);

// Repeaterless bound -log2(1 - 10^{-alpha L / 10}) in bits per channel use.
double plob_bound(double distance_km, double alpha_db_per_km = 0.16);

struct EpsilonBudget {
  double eps_prime = 1e-10;
  double eps_hat = 1e-10;
  double eps_e = 1e-10;
  double eps_beta = 1e-10;
  double eps_0 = 1e-10;
  double eps_1 = 1e-10;
  double eps_pa = 1e-10;
  double eps_cor = 1e-10;

  static EpsilonBudget uniform(double eps);
};

// 2(eps' + eps^ + 2 eps_e) + eps_beta + eps_0 + eps_1 + eps_PA
double epsilon_budget(const EpsilonBudget& eps);

struct KeyRateReport {
  double rate_per_pulse = 0.0;
  double rate_per_second = 0.0;
  double rate_unclamped = 0.0;  // per pulse, before clamping at 0
  double key_bits = 0.0;        // bracketed term, before clamping
  double lambda_ec = 0.0;
  double e_z = 0.0;
  double eps_sec = 0.0;
  double eps_cor = 0.0;
  double plob = 0.0;
  PairingStatistics stats;
  DecoyEstimate decoy;
  std::string diagnostic;  // empty on success
};

KeyRateReport secret_key_rate(const PairingStatistics& stats, const DecoyEstimate& est,
                              const EpsilonBudget& eps, const ProtocolTiming& timing, double f_ec);

} // namespace amdi

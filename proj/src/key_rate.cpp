#include "amdi/key_rate.hpp"

#include <algorithm>
#include <cmath>

#include "amdi/errors.hpp"

namespace amdi {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary_entropy: argument must lie in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double lambda_ec(double n_z, double m_z, double f) {
  if (n_z <= 0.0) return 0.0;
  return n_z * f * binary_entropy(std::clamp(m_z / n_z, 0.0, 1.0));
}

double plob_bound(double distance_km, double alpha_db_per_km) {
  const double loss = std::pow(10.0, -alpha_db_per_km * distance_km / 10.0);
  if (loss >= 1.0) return INFINITY;
  return -std::log1p(-loss) / std::log(2.0);
}

EpsilonBudget EpsilonBudget::uniform(double eps) {
  return {eps, eps, eps, eps, eps, eps, eps, eps};
}

double epsilon_budget(const EpsilonBudget& e) {
  return 2.0 * (e.eps_prime + e.eps_hat + 2.0 * e.eps_e) + e.eps_beta + e.eps_0 + e.eps_1 + e.eps_pa;
}

KeyRateReport secret_key_rate(const PairingStatistics& stats, const DecoyEstimate& est,
                              const EpsilonBudget& eps, const ProtocolTiming& timing, double f_ec) {
  KeyRateReport r;
  r.stats = stats;
  r.decoy = est;
  r.eps_sec = epsilon_budget(eps);
  r.eps_cor = eps.eps_cor;
  r.lambda_ec = lambda_ec(stats.n_z, stats.m_z, f_ec);
  r.e_z = stats.n_z > 0.0 ? stats.m_z / stats.n_z : 0.0;

  const double overhead = std::log2(2.0 / eps.eps_cor) +
                          2.0 * std::log2(2.0 / (eps.eps_prime * eps.eps_hat)) +
                          2.0 * std::log2(1.0 / (2.0 * eps.eps_pa));
  if (!est.ok) {
    r.diagnostic = est.failure;
    r.key_bits = -overhead;
  } else {
    r.key_bits = est.s0_z_lower + est.s11_z_lower * (1.0 - binary_entropy(est.phi11_z_upper)) -
                 r.lambda_ec - overhead;
  }
  r.rate_unclamped = r.key_bits / timing.n_pulses;
  r.rate_per_pulse = std::max(0.0, r.rate_unclamped);
  r.rate_per_second = timing.rep_rate_hz * r.rate_per_pulse;
  if (r.diagnostic.empty() && r.rate_unclamped <= 0.0) r.diagnostic = "non-positive key length";
  return r;
}

} // namespace amdi

#include "amdi/sources.hpp"

#include <cmath>
#include <sstream>

#include "amdi/errors.hpp"

namespace amdi {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log_sinh(double x) { return x + std::log1p(-std::exp(-2.0 * x)) - kLn2; }
double log_cosh(double x) { return x + std::log1p(std::exp(-2.0 * x)) - kLn2; }

void check_intensity(double mu, const char* who) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) {
    std::ostringstream os;
    os << who << ": intensity must be finite and >= 0 (got " << mu << ")";
    throw DomainError(os.str());
  }
}

// Terms beyond the cutoff, summed directly so the reported tail is never
// negative from cancellation. Terms are taken in odd/even pairs since one
// parity may vanish.
template <class Term>
double tail_sum(std::size_t cutoff, double mu, Term term) {
  double tail = 0.0;
  for (std::size_t n = cutoff + 1; n < cutoff + 4000; n += 2) {
    const double t = term(n) + term(n + 1);
    tail += t;
    if (static_cast<double>(n) > mu && t <= tail * 1e-18) break;
  }
  return tail;
}

} // namespace

void SourceSpec::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("source: " + msg); };
  if (!(mu >= 0.0)) fail("mu must be >= 0");
  if (!(omega > 0.0)) fail("omega must be > 0 (decoy ordering nu > omega > o = 0)");
  if (!(nu > omega)) fail("nu must be > omega (decoy ordering nu > omega > o = 0)");
  if (!(purity >= 0.0 && purity <= 1.0)) fail("purity must lie in [0,1]");
  if (p_signal < 0.0 || p_nu < 0.0 || p_omega < 0.0)
    fail("send probabilities must be nonnegative");
  if (p_vacuum() < -1e-12) fail("send probabilities p_signal + p_nu + p_omega must not exceed 1");
}

double PhotonNumberDistribution::mean() const {
  double m = 0.0;
  for (std::size_t n = 1; n < probs.size(); ++n) m += static_cast<double>(n) * probs[n];
  return m;
}

PhotonNumberDistribution css_pnd(double mu, double purity, std::size_t cutoff) {
  check_intensity(mu, "css_pnd");
  if (!(purity >= 0.0 && purity <= 1.0))
    throw DomainError("css_pnd: purity must lie in [0,1]");
  if (cutoff < 1) throw DomainError("css_pnd: cutoff must be >= 1");

  PhotonNumberDistribution pnd;
  pnd.probs.assign(cutoff + 1, 0.0);
  if (mu == 0.0) {
    // Zero amplitude: nothing is emitted.
    pnd.probs[0] = 1.0;
    return pnd;
  }
  const double log_mu = std::log(mu);
  const double ls = log_sinh(mu);
  const double lc = log_cosh(mu);
  auto term = [&](std::size_t n) {
    const double weight = (n % 2 == 1) ? purity : 1.0 - purity;
    if (weight == 0.0) return 0.0;
    const double log_norm = (n % 2 == 1) ? ls : lc;
    return weight * std::exp(static_cast<double>(n) * log_mu -
                             std::lgamma(static_cast<double>(n) + 1.0) - log_norm);
  };
  for (std::size_t n = 0; n <= cutoff; ++n) pnd.probs[n] = term(n);
  pnd.tail_mass = tail_sum(cutoff, mu, term);
  return pnd;
}

PhotonNumberDistribution wcs_pnd(double mu, std::size_t cutoff) {
  check_intensity(mu, "wcs_pnd");
  PhotonNumberDistribution pnd;
  pnd.probs.assign(cutoff + 1, 0.0);
  if (mu == 0.0) {
    pnd.probs[0] = 1.0;
    return pnd;
  }
  const double log_mu = std::log(mu);
  auto term = [&](std::size_t n) {
    return std::exp(static_cast<double>(n) * log_mu - mu -
                    std::lgamma(static_cast<double>(n) + 1.0));
  };
  for (std::size_t n = 0; n <= cutoff; ++n) pnd.probs[n] = term(n);
  pnd.tail_mass = tail_sum(cutoff, mu, term);
  return pnd;
}

PhotonNumberDistribution signal_pnd(const SourceSpec& spec, std::size_t cutoff) {
  return spec.signal_kind == SignalKind::Cat ? css_pnd(spec.mu, spec.purity, cutoff)
                                             : wcs_pnd(spec.mu, cutoff);
}

double single_photon_prob(const SourceSpec& spec) {
  spec.validate();
  const double mu = spec.mu;
  if (spec.signal_kind == SignalKind::Wcs) return mu * std::exp(-mu);
  if (mu == 0.0) return 0.0;
  return spec.purity * mu / std::sinh(mu);
}

double vacuum_prob(const SourceSpec& spec) {
  spec.validate();
  const double mu = spec.mu;
  if (spec.signal_kind == SignalKind::Wcs) return std::exp(-mu);
  if (mu == 0.0) return 1.0;
  return (1.0 - spec.purity) / std::cosh(mu);
}

double cat_single_photon_prob_normalized(double mu) {
  check_intensity(mu, "cat_single_photon_prob_normalized");
  if (mu == 0.0) return 0.0;
  const double n_minus = -2.0 * std::expm1(-2.0 * mu);
  return 4.0 / n_minus * mu * std::exp(-mu);
}

} // namespace amdi

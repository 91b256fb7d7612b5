#pragma once

#include <cstddef>
#include <vector>

namespace amdi {

inline constexpr std::size_t kDefaultPhotonCutoff = 40;
inline constexpr double kDefaultTailTolerance = 1e-12;

enum class SignalKind { Cat, Wcs };

// One party's source: signal window (cat or WCS of intensity mu) plus the
// weak-coherent decoys nu > omega > o = 0.
struct SourceSpec {
  double mu = 0.0;
  double nu = 0.0;
  double omega = 0.0;
  double p_signal = 0.0;
  double p_nu = 0.0;
  double p_omega = 0.0;
  double purity = 1.0;
  SignalKind signal_kind = SignalKind::Cat;

  // Remainder of the send-probability simplex.
  double p_vacuum() const { return 1.0 - p_signal - p_nu - p_omega; }

  // Throws ConfigError naming the first violated invariant.
  void validate() const;
};

// Truncated photon-number distribution. Entries are stored as computed, not
// renormalised; tail_mass = 1 - sum(probs) is the mass beyond `cutoff`.
struct PhotonNumberDistribution {
  std::vector<double> probs;
  double tail_mass = 0.0;

  std::size_t cutoff() const { return probs.empty() ? 0 : probs.size() - 1; }
  double operator[](std::size_t n) const { return n < probs.size() ? probs[n] : 0.0; }
  double mean() const;
};

// Phase-randomised imperfect cat state: odd branch weighted by `purity`,
// even branch by 1 - purity.
PhotonNumberDistribution css_pnd(double mu, double purity,
                                 std::size_t cutoff = kDefaultPhotonCutoff);

// Poisson distribution of a phase-randomised coherent state.
PhotonNumberDistribution wcs_pnd(double mu, std::size_t cutoff = kDefaultPhotonCutoff);

// Distribution of whatever the source emits in its signal window.
PhotonNumberDistribution signal_pnd(const SourceSpec& spec,
                                    std::size_t cutoff = kDefaultPhotonCutoff);

double single_photon_prob(const SourceSpec& spec);
double vacuum_prob(const SourceSpec& spec);

// Perfect-cat single-photon probability written with the cat normalisation
// N_- = 2(1 - exp(-2 mu)). Algebraically equal to mu / sinh(mu).
double cat_single_photon_prob_normalized(double mu);

} // namespace amdi

// Independent reference computations used by the tests. Each one follows the
// textbook definition directly and shares no code with the library kernels.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "amdi/detection.hpp"
#include "amdi/pairing.hpp"

namespace oracle {

inline long double binom(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0.0L;
  return std::exp(std::lgamma(static_cast<long double>(n + 1)) - std::lgamma(static_cast<long double>(k + 1)) -
                  std::lgamma(static_cast<long double>(n - k + 1)));
}

// P_{i,j}(p) from the combinatorial sum, evaluated in long double.
inline std::vector<long double> beamsplitter_literal(long i, long j) {
  std::vector<long double> out(static_cast<std::size_t>(i + j + 1));
  const long double norm =
      std::sqrt(std::pow(2.0L, static_cast<long double>(i + j)) * std::tgamma(static_cast<long double>(i + 1)) *
                std::tgamma(static_cast<long double>(j + 1)));
  for (long p = 0; p <= i + j; ++p) {
    long double s = 0.0L;
    for (long k = 0; k <= j; ++k) {
      const long double sign = ((j - k) % 2 == 0) ? 1.0L : -1.0L;
      s += sign * binom(i, p - k) * binom(j, k);
    }
    const long double amp = s / norm * std::sqrt(std::tgamma(static_cast<long double>(p + 1))) *
                            std::sqrt(std::tgamma(static_cast<long double>(i + j - p + 1)));
    out[static_cast<std::size_t>(p)] = amp * amp;
  }
  return out;
}

// Y^L + Y^R for Fock inputs via the literal P_{i,j}.
inline double fock_total_yield(long i, long j, const amdi::DetectorModel& m) {
  const auto P = beamsplitter_literal(i, j);
  const long double eta = m.eta(), pd = m.p_d;
  long double y = 0.0L;
  for (long p = 0; p <= i + j; ++p) {
    const long double dl = 1.0L - (1.0L - pd) * std::pow(1.0L - eta, static_cast<long double>(p));
    const long double dr = 1.0L - (1.0L - pd) * std::pow(1.0L - eta, static_cast<long double>(i + j - p));
    y += (dl * (1.0L - dr) + (1.0L - dl) * dr) * P[static_cast<std::size_t>(p)];
  }
  return static_cast<double>(y);
}

// sum_{i=0}^{n-1} (i+1)(1-q)^i q / (F sum_{i=0}^{n-1} (1-q)^i q)
inline double mean_pair_time_series(double q, long n, double f) {
  long double num = 0.0L, den = 0.0L, w = q;
  for (long i = 0; i < n; ++i) {
    num += static_cast<long double>(i + 1) * w;
    den += w;
    w *= (1.0L - q);
  }
  return static_cast<double>(num / (static_cast<long double>(f) * den));
}

inline double poisson(double mu, int n) { return std::exp(-mu + n * std::log(mu) - std::lgamma(n + 1.0)); }

// Expected Z-basis pairs in which both signal pulses carried exactly one
// photon, from Fock yields (Y_ij = total single-click yield).
inline double single_photon_pairs_z(const amdi::SourceSpec& a, const amdi::SourceSpec& b, double p1_a, double p1_b,
                                    const amdi::DetectorModel& m, double q_tot, double n_tot) {
  const double y00 = fock_total_yield(0, 0, m), y11 = fock_total_yield(1, 1, m);
  const double y10 = fock_total_yield(1, 0, m), y01 = fock_total_yield(0, 1, m);
  const double w = a.p_signal * b.p_signal * a.p_vacuum() * b.p_vacuum();
  return n_tot / (q_tot * q_tot) * 2.0 * w * p1_a * p1_b * (y11 * y00 + y10 * y01);
}

// Same for phase-matched [2w,2w] pairs: each party holds one photon spread
// over its two omega pulses.
inline double single_photon_pairs_x(const amdi::SourceSpec& a, const amdi::SourceSpec& b,
                                    const amdi::DetectorModel& m, double q_tot, double n_tot, int slices) {
  const double y00 = fock_total_yield(0, 0, m), y11 = fock_total_yield(1, 1, m);
  const double y10 = fock_total_yield(1, 0, m), y01 = fock_total_yield(0, 1, m);
  const double w = a.p_omega * b.p_omega / q_tot;
  const double one_a = 2.0 * a.omega * std::exp(-2.0 * a.omega);
  const double one_b = 2.0 * b.omega * std::exp(-2.0 * b.omega);
  return n_tot * (2.0 / slices) * w * w * one_a * one_b * 0.5 * (y11 * y00 + y10 * y01);
}

} // namespace oracle

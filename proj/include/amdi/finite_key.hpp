#pragma once

#include <map>
#include <string>

#include "amdi/pairing.hpp"
#include "amdi/sources.hpp"

namespace amdi {

enum class BoundKind { Expected, Observed };

// A count together with its confidence interval at failure probability
// `epsilon`. For kind == Expected the interval brackets the expectation
// given an observation; for Observed it brackets the observation given an
// expectation.
struct BoundedCount {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double epsilon = 0.0;
  BoundKind kind = BoundKind::Expected;
};

// How statistical fluctuations enter the decoy composites S1 and S2.
enum class Fluctuation {
  PerTerm,  // bound every n[.,.] separately, combine with worst-case signs
  Joint,    // one bound on each weighted sum
  None      // asymptotic: bounds collapse to the central values
};

const char* fluctuation_name(Fluctuation f);

// Observed count -> bounds on its expectation.
BoundedCount expected_bounds(double observed, double epsilon);
// Expectation -> bounds on the observed count.
BoundedCount observed_bounds(double expected, double epsilon);

struct FiniteKeyOptions {
  double eps_0 = 1e-10;  // vacuum term
  double eps_1 = 1e-10;  // Z single-photon pairs
  double eps_e = 1e-10;  // X single-photon pairs and phase error
  Fluctuation mode = Fluctuation::PerTerm;
  // When false the X-basis single-photon bound and the vacuum error count
  // stay expected-value bounds, so the phase error is a ratio of two
  // quantities in expectation space. When true both are additionally
  // converted to observed-count lower bounds.
  bool x_observed_conversion = false;
};

using CategoryCounts = std::map<Category, double>;
using CategoryBounds = std::map<Category, BoundedCount>;

// Expected-value bounds for every observed category count.
CategoryBounds bound_counts(const CategoryCounts& observed, double epsilon, Fluctuation mode);

struct Composites {
  double s1_lower = 0.0;
  double s2_upper = 0.0;
  double difference() const { return s1_lower - s2_upper; }
};

// S1 (lower) and S2 (upper) from the decoy categories [w,w], [o,nu], [nu,o],
// [o,o], [nu,nu], [o,w], [w,o].
Composites s_composites(const CategoryBounds& n, const std::map<Category, double>& p, double nu,
                        double omega, Fluctuation mode);

// Expected-value estimators, clamped at 0. The *_lower functions below
// convert them to observed-count lower bounds.
double s11_z_expected(const Composites& c, double p1_a, double p1_b, double p_signal_signal,
                      double nu, double omega);
double s0_z_expected(const BoundedCount& n_vac_signal, double p0_a, double p_signal_signal,
                     double p_vac_signal);
double s11_x_expected(const Composites& c, double nu, double omega, double p_2w2w);
double m0_x_expected(const CategoryBounds& n, const std::map<Category, double>& p, double omega,
                     double p_2w2w);

double to_observed_lower(double expected, double epsilon, Fluctuation mode);

double s11_z_lower(const Composites& c, const SourceSpec& a, const SourceSpec& b,
                   double p_signal_signal, double epsilon, Fluctuation mode);
double s0_z_lower(const BoundedCount& n_vac_signal, double p0_a, double p_signal_signal,
                  double p_vac_signal, double epsilon, Fluctuation mode);
double s11_x_lower(const Composites& c, double nu, double omega, double p_2w2w, double epsilon,
                   Fluctuation mode);
double t11_x_upper(double m_x_observed, double m0_observed_lower);
// Throws EstimationError when s11_x_lower == 0.
double phi11_z_upper(double t11_x_upper, double s11_x_lower);

struct DecoyEstimate {
  double s0_z_lower = 0.0;
  double s11_z_lower = 0.0;
  double s11_x_lower = 0.0;
  double t11_x_upper = 0.0;
  double phi11_z_upper = 0.5;
  double m0_x_lower = 0.0;
  Composites z_composites;
  Composites x_composites;
  double eps_0 = 0.0;
  double eps_1 = 0.0;
  double eps_e = 0.0;
  bool ok = true;
  std::string failure;  // set when ok == false
};

// Full decoy chain on one set of pairing statistics (expected counts are
// taken as the observed data). Never throws EstimationError: failures are
// reported through ok/failure.
DecoyEstimate estimate_decoy(const PairingStatistics& stats, const SourceSpec& a,
                             const SourceSpec& b, int phase_slices, const FiniteKeyOptions& opt);

} // namespace amdi

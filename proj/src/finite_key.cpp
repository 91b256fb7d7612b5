#include "amdi/finite_key.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "amdi/errors.hpp"

namespace amdi {

const char* fluctuation_name(Fluctuation f) {
  switch (f) {
    case Fluctuation::PerTerm: return "per-term";
    case Fluctuation::Joint: return "joint";
    case Fluctuation::None: return "none";
  }
  return "?";
}

namespace {

double beta_of(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw DomainError("finite_key: epsilon must lie in (0,1)");
  return std::log(1.0 / epsilon);
}

double lookup(const std::map<Category, double>& m, const Category& c) {
  auto it = m.find(c);
  if (it == m.end()) throw EstimationError("finite_key: missing category " + c.label());
  return it->second;
}

const BoundedCount& lookup(const CategoryBounds& m, const Category& c) {
  auto it = m.find(c);
  if (it == m.end()) throw EstimationError("finite_key: missing category " + c.label());
  return it->second;
}

struct Term {
  double coeff;
  const BoundedCount* n;
};

// Lower (want_upper == false) or upper bound of sum(coeff * n) with all
// coefficients nonnegative.
double combine(const std::vector<Term>& terms, bool want_upper, Fluctuation mode) {
  if (mode == Fluctuation::Joint) {
    double cmax = 0.0;
    for (const Term& t : terms) cmax = std::max(cmax, t.coeff);
    if (cmax == 0.0) return 0.0;
    double scaled = 0.0;
    for (const Term& t : terms) scaled += t.coeff / cmax * t.n->value;
    const BoundedCount b = expected_bounds(scaled, terms.front().n->epsilon);
    return cmax * (want_upper ? b.upper : b.lower);
  }
  double sum = 0.0;
  for (const Term& t : terms) {
    const double v = mode == Fluctuation::None ? t.n->value : (want_upper ? t.n->upper : t.n->lower);
    sum += t.coeff * v;
  }
  return sum;
}

} // namespace

BoundedCount expected_bounds(double observed, double epsilon) {
  const double beta = beta_of(epsilon);
  if (observed < 0.0) throw DomainError("expected_bounds: count must be >= 0");
  BoundedCount b;
  b.value = observed;
  b.epsilon = epsilon;
  b.kind = BoundKind::Expected;
  b.upper = observed + beta + std::sqrt(2.0 * beta * observed + beta * beta);
  b.lower = std::max(0.0, observed - std::sqrt(2.0 * beta * observed));
  return b;
}

BoundedCount observed_bounds(double expected, double epsilon) {
  const double beta = beta_of(epsilon);
  if (expected < 0.0) throw DomainError("observed_bounds: count must be >= 0");
  BoundedCount b;
  b.value = expected;
  b.epsilon = epsilon;
  b.kind = BoundKind::Observed;
  b.upper = expected + 0.5 * (beta + std::sqrt(beta * beta + 8.0 * beta * expected));
  b.lower = std::max(0.0, expected - std::sqrt(2.0 * beta * expected));
  return b;
}

CategoryBounds bound_counts(const CategoryCounts& observed, double epsilon, Fluctuation mode) {
  CategoryBounds out;
  for (const auto& [c, n] : observed) {
    BoundedCount b = expected_bounds(std::max(0.0, n), epsilon);
    if (mode == Fluctuation::None) b.lower = b.upper = b.value;
    out.emplace(c, b);
  }
  return out;
}

Composites s_composites(const CategoryBounds& n, const std::map<Category, double>& p, double nu,
                        double omega, Fluctuation mode) {
  if (!(nu > omega && omega > 0.0)) throw DomainError("s_composites: require nu > omega > 0");
  const double nu3 = nu * nu * nu, w3 = omega * omega * omega;
  auto coeff = [&](double scale, const Category& c) {
    const double pc = lookup(p, c);
    if (!(pc > 0.0)) throw EstimationError("finite_key: zero probability for category " + c.label());
    return scale / pc;
  };
  const std::vector<Term> s1{
      {coeff(nu3 * std::exp(2.0 * omega), cat::omega_omega()), &lookup(n, cat::omega_omega())},
      {coeff(w3 * std::exp(nu), cat::vac_nu()), &lookup(n, cat::vac_nu())},
      {coeff(w3 * std::exp(nu), cat::nu_vac()), &lookup(n, cat::nu_vac())},
      {coeff(nu3 - w3, cat::vac_vac()), &lookup(n, cat::vac_vac())},
  };
  const std::vector<Term> s2{
      {coeff(w3 * std::exp(2.0 * nu), cat::nu_nu()), &lookup(n, cat::nu_nu())},
      {coeff(nu3 * std::exp(omega), cat::vac_omega()), &lookup(n, cat::vac_omega())},
      {coeff(nu3 * std::exp(omega), cat::omega_vac()), &lookup(n, cat::omega_vac())},
  };
  return {combine(s1, false, mode), combine(s2, true, mode)};
}

double s11_z_expected(const Composites& c, double p1_a, double p1_b, double p_ss, double nu,
                      double omega) {
  const double denom = nu * nu * omega * omega * (nu - omega);
  return std::max(0.0, p1_a * p1_b * p_ss / denom * c.difference());
}

double s0_z_expected(const BoundedCount& n_vac_signal, double p0_a, double p_ss, double p_vac_signal) {
  if (p0_a == 0.0) return 0.0;
  if (!(p_vac_signal > 0.0)) throw EstimationError("finite_key: zero probability for [o,xi]");
  return std::max(0.0, p0_a * p_ss / p_vac_signal * n_vac_signal.lower);
}

double s11_x_expected(const Composites& c, double nu, double omega, double p_2w2w) {
  const double w2 = omega * omega;
  const double factor = w2 * std::exp(-4.0 * omega) * 4.0 * p_2w2w / (w2 * nu * nu * (nu - omega));
  return std::max(0.0, factor * c.difference());
}

double m0_x_expected(const CategoryBounds& n, const std::map<Category, double>& p, double omega,
                     double p_2w2w) {
  auto term = [&](double damp, const Category& c) {
    const double pc = lookup(p, c);
    if (!(pc > 0.0)) throw EstimationError("finite_key: zero probability for category " + c.label());
    return damp * p_2w2w / (2.0 * pc) * lookup(n, c).lower;
  };
  const double e2 = std::exp(-2.0 * omega);
  return term(e2, cat::vac_2omega()) + term(e2, cat::two_omega_vac()) +
         term(e2 * e2, cat::vac_vac());
}

double to_observed_lower(double expected, double epsilon, Fluctuation mode) {
  if (mode == Fluctuation::None) return expected;
  return observed_bounds(expected, epsilon).lower;
}

double s11_z_lower(const Composites& c, const SourceSpec& a, const SourceSpec& b, double p_ss,
                   double epsilon, Fluctuation mode) {
  const double e = s11_z_expected(c, single_photon_prob(a), single_photon_prob(b), p_ss, a.nu, a.omega);
  return to_observed_lower(e, epsilon, mode);
}

double s0_z_lower(const BoundedCount& n_vac_signal, double p0_a, double p_ss, double p_vac_signal,
                  double epsilon, Fluctuation mode) {
  return to_observed_lower(s0_z_expected(n_vac_signal, p0_a, p_ss, p_vac_signal), epsilon, mode);
}

double s11_x_lower(const Composites& c, double nu, double omega, double p_2w2w, double epsilon,
                   Fluctuation mode) {
  return to_observed_lower(s11_x_expected(c, nu, omega, p_2w2w), epsilon, mode);
}

double t11_x_upper(double m_x_observed, double m0_observed_lower) {
  return std::max(0.0, m_x_observed - m0_observed_lower);
}

double phi11_z_upper(double t, double s) {
  if (!(s > 0.0)) throw EstimationError("phase error: X-basis single-photon-pair bound is zero");
  return std::clamp(t / s, 0.0, 0.5);
}

DecoyEstimate estimate_decoy(const PairingStatistics& stats, const SourceSpec& a, const SourceSpec& b,
                             int phase_slices, const FiniteKeyOptions& opt) {
  DecoyEstimate est;
  est.eps_0 = opt.eps_0;
  est.eps_1 = opt.eps_1;
  est.eps_e = opt.eps_e;
  if (a.nu != b.nu || a.omega != b.omega)
    throw ConfigError("finite_key: decoy intensities must be symmetric (nu_a = nu_b, omega_a = omega_b)");
  try {
    std::map<Category, double> p;
    for (const auto& [c, n] : stats.n_counts) {
      (void)n;
      p[c] = category_probability(a, b, c);
    }
    const double p_ss = p.at(cat::signal_signal());
    const double p_2w2w = x_category_probability(a, b, phase_slices);

    const CategoryBounds n1 = bound_counts(stats.n_counts, opt.eps_1, opt.mode);
    est.z_composites = s_composites(n1, p, a.nu, a.omega, opt.mode);
    est.s11_z_lower = s11_z_lower(est.z_composites, a, b, p_ss, opt.eps_1, opt.mode);

    const CategoryBounds n0 = bound_counts(stats.n_counts, opt.eps_0, opt.mode);
    est.s0_z_lower = s0_z_lower(lookup(n0, cat::vac_signal()), vacuum_prob(a), p_ss,
                                p.at(cat::vac_signal()), opt.eps_0, opt.mode);

    const CategoryBounds ne = bound_counts(stats.n_counts, opt.eps_e, opt.mode);
    est.x_composites = s_composites(ne, p, a.nu, a.omega, opt.mode);
    const Fluctuation x_mode = opt.x_observed_conversion ? opt.mode : Fluctuation::None;
    est.s11_x_lower = s11_x_lower(est.x_composites, a.nu, a.omega, p_2w2w, opt.eps_e, x_mode);
    est.m0_x_lower = to_observed_lower(m0_x_expected(ne, p, a.omega, p_2w2w), opt.eps_e, x_mode);
    est.t11_x_upper = t11_x_upper(stats.m_x, est.m0_x_lower);
    est.phi11_z_upper = phi11_z_upper(est.t11_x_upper, est.s11_x_lower);
  } catch (const EstimationError& e) {
    est.ok = false;
    est.failure = e.what();
    est.phi11_z_upper = 0.5;
  }
  return est;
}

} // namespace amdi

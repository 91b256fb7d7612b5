#include "amdi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include "amdi/errors.hpp"

namespace amdi {

namespace {

constexpr double kInfeasible = 1e3;

double simplex_diameter(const std::vector<std::vector<double>>& s) {
  double d = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i)
    for (std::size_t k = 0; k < s[0].size(); ++k) d = std::max(d, std::abs(s[i][k] - s[0][k]));
  return d;
}

// Penalised objective: minus the unclamped rate; infeasible points get a
// large value that still points back toward the feasible set.
double objective(const OptimizationSpace& space, const SourceParams& p, double distance_km) {
  double violation = 0.0;
  if (p.nu <= p.omega) violation += p.omega - p.nu + 1e-12;
  if (space.bounds.signal_at_least_nu && p.mu < p.nu) violation += p.nu - p.mu;
  if (!space.bounds.contains(p)) violation += 1e-12;
  if (violation > 0.0) return kInfeasible + violation;
  KeyRateReport r;
  try {
    r = evaluate_key_rate(space.protocol, p, distance_km);
  } catch (const ConfigError&) {
    return 2.0 * kInfeasible;
  }
  const DecoyEstimate& d = r.decoy;
  if (d.ok && d.phi11_z_upper < 0.5) return -r.rate_unclamped;
  // Saturated phase error: rank by the unclamped phase-error ratio, then by
  // the normalised X decoy difference, so the simplex can leave flat regions.
  if (d.s11_x_lower > 0.0) {
    const double g = d.t11_x_upper / d.s11_x_lower;
    return 1.0 + g / (1.0 + g);
  }
  const Composites& c = d.x_composites;
  const double scale = std::abs(c.s1_lower) + std::abs(c.s2_upper);
  const double norm = scale > 0.0 ? c.difference() / scale : -1.0;
  return 2.5 - 0.5 * norm;
}

bool lex_less(const SourceParams& a, const SourceParams& b) {
  const auto x = a.as_array(), y = b.as_array();
  return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
}

// `a` beats `b`: strictly better value, or a tie within 1e-12 relative
// broken toward the lexicographically smaller parameter vector.
bool better(double fa, const SourceParams& a, double fb, const SourceParams& b) {
  const double scale = std::max(std::abs(fa), std::abs(fb));
  if (std::abs(fa - fb) <= 1e-12 * scale) return lex_less(a, b);
  return fa < fb;
}

std::vector<double> random_start(const ParamBounds& b, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto log_uniform = [&](double lo, double hi) {
    return std::exp(std::log(lo) + u(rng) * (std::log(hi) - std::log(lo)));
  };
  SourceParams p;
  p.mu = log_uniform(b.lo[0], b.hi[0]);
  p.omega = log_uniform(b.lo[2], std::min(b.hi[2], 0.5 * b.hi[1]));
  p.nu = log_uniform(std::max(b.lo[1], 1.5 * p.omega), std::max(b.hi[1], 1.5 * p.omega));
  p.p_signal = log_uniform(std::max(b.lo[3], 0.05), std::min(b.hi[3], 0.8));
  p.p_nu = log_uniform(b.lo[4], std::min(b.hi[4], 0.2));
  p.p_omega = log_uniform(b.lo[5], std::min(b.hi[5], 0.2));
  p.tc_seconds = log_uniform(b.lo[6], b.hi[6]);
  return encode_params(p);
}

} // namespace

bool ParamBounds::contains(const SourceParams& p) const {
  const auto v = p.as_array();
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!(v[k] >= lo[k] && v[k] <= hi[k])) return false;
  if (signal_at_least_nu && p.mu < p.nu) return false;
  return 1.0 - p.p_signal - p.p_nu - p.p_omega >= min_p_vacuum - 1e-12;
}

std::vector<double> encode_params(const SourceParams& p) {
  const double po = 1.0 - p.p_signal - p.p_nu - p.p_omega;
  if (!(po > 0.0)) throw ConfigError("optimizer: vacuum probability must be positive");
  return {std::log(p.mu),           std::log(p.nu),           std::log(p.omega),
          std::log(p.p_signal / po), std::log(p.p_nu / po), std::log(p.p_omega / po),
          std::log(p.tc_seconds)};
}

SourceParams decode_params(const std::vector<double>& x, const ParamBounds& b) {
  std::array<double, SourceParams::kDim> v{};
  v[0] = std::exp(x[0]);
  v[1] = std::exp(x[1]);
  v[2] = std::exp(x[2]);
  // softmax with the vacuum as reference (log-sum-exp for stability)
  const double zmax = std::max({0.0, x[3], x[4], x[5]});
  const double denom = std::exp(-zmax) + std::exp(x[3] - zmax) + std::exp(x[4] - zmax) + std::exp(x[5] - zmax);
  for (int k = 3; k < 6; ++k) v[k] = std::exp(x[k] - zmax) / denom;
  v[6] = std::exp(x[6]);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::clamp(v[k], b.lo[k], b.hi[k]);
  const double sum = v[3] + v[4] + v[5];
  const double cap = 1.0 - b.min_p_vacuum;
  if (sum > cap) {
    // shrink the excess above the lower bounds
    const double floor = b.lo[3] + b.lo[4] + b.lo[5];
    const double s = (cap - floor) / (sum - floor);
    for (int k = 3; k < 6; ++k) v[k] = b.lo[k] + (v[k] - b.lo[k]) * s;
  }
  return SourceParams::from_array(v);
}

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, double step, int max_evals, double tolerance) {
  const std::size_t n = x0.size();
  std::vector<std::vector<double>> s(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) s[i + 1][i] += step;
  std::vector<double> fv(n + 1);
  int evals = 0;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]), ++evals;

  std::vector<std::size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> s2;
    std::vector<double> f2;
    for (auto i : order) s2.push_back(s[i]), f2.push_back(fv[i]);
    s = std::move(s2);
    fv = std::move(f2);
  };
  auto along = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[k] = c[k] + t * (w[k] - c[k]);
    return r;
  };

  sort_simplex();
  while (evals < max_evals && simplex_diameter(s) >= tolerance) {
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) c[k] += s[i][k] / static_cast<double>(n);

    const auto xr = along(c, s[n], -1.0);
    const double fr = f(xr);
    ++evals;
    if (fr < fv[0]) {
      const auto xe = along(c, s[n], -2.0);
      const double fe = f(xe);
      ++evals;
      if (fe < fr) s[n] = xe, fv[n] = fe;
      else s[n] = xr, fv[n] = fr;
    } else if (fr < fv[n - 1]) {
      s[n] = xr, fv[n] = fr;
    } else {
      const bool outside = fr < fv[n];
      const auto xc = outside ? along(c, xr, 0.5) : along(c, s[n], 0.5);
      const double fc = f(xc);
      ++evals;
      if (fc < (outside ? fr : fv[n])) {
        s[n] = xc, fv[n] = fc;
      } else {
        for (std::size_t i = 1; i <= n; ++i) {
          s[i] = along(s[0], s[i], 0.5);
          fv[i] = f(s[i]);
          ++evals;
        }
      }
    }
    sort_simplex();
  }
  return {s[0], fv[0], evals};
}

OptimizationResult optimize_at_distance(const OptimizationSpace& space, double distance_km, std::uint64_t seed,
                                        const std::optional<SourceParams>& warm_start) {
  space.protocol.validate();
  const int starts = std::max(1, space.settings.starts);
  const ParamBounds& b = space.bounds;

  std::vector<std::vector<double>> x0(starts);
  x0[0] = encode_params(warm_start.value_or(space.initial));
  for (int i = 1; i < starts; ++i) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    std::mt19937_64 rng(seq);
    x0[i] = random_start(b, rng);
  }

  std::vector<SourceParams> best_p(starts);
  std::vector<double> best_f(starts);
  std::vector<int> evals(starts);
  auto f = [&](const std::vector<double>& x) { return objective(space, decode_params(x, b), distance_km); };

#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < starts; ++i) {
    // one restart from the converged point guards against early collapse
    SimplexResult r = nelder_mead(f, x0[i], 0.3, space.settings.max_evals, space.settings.tolerance);
    int used = r.evaluations;
    if (used < space.settings.max_evals) {
      SimplexResult r2 = nelder_mead(f, r.x, 0.05, space.settings.max_evals - used, space.settings.tolerance);
      used += r2.evaluations;
      if (r2.value <= r.value) r = r2;
    }
    best_p[i] = decode_params(r.x, b);
    best_f[i] = r.value;
    evals[i] = used;
    if (space.settings.verbose) {
#pragma omp critical(amdi_optimizer_log)
      std::fprintf(stderr, "[optimize] L=%.1f km start %d: rate=%.6e evals=%d\n", distance_km, i, -r.value, used);
    }
  }

  int best = 0;
  for (int i = 1; i < starts; ++i)
    if (better(best_f[i], best_p[i], best_f[best], best_p[best])) best = i;

  OptimizationResult out;
  out.distance_km = distance_km;
  out.params = best_p[best];
  out.report = evaluate_key_rate(space.protocol, out.params, distance_km);
  out.evaluations = std::accumulate(evals.begin(), evals.end(), 0);
  return out;
}

double max_distance(const OptimizationSpace& space, std::uint64_t seed, double lo_km, const SourceParams& lo_params,
                    double hi_km) {
  if (!(hi_km > lo_km)) throw ConfigError("optimizer: max-distance bracket must satisfy lo < hi");
  SourceParams warm = lo_params;
  while (hi_km - lo_km > 1.0) {
    const double mid = 0.5 * (lo_km + hi_km);
    const OptimizationResult r = optimize_at_distance(space, mid, seed, warm);
    if (r.report.rate_per_pulse > 0.0) {
      lo_km = mid;
      warm = r.params;
    } else {
      hi_km = mid;
    }
    if (space.settings.verbose) std::fprintf(stderr, "[max-distance] bracket [%.2f, %.2f] km\n", lo_km, hi_km);
  }
  return lo_km;
}

SweepResult sweep(const OptimizationSpace& space, const std::vector<double>& distances, std::uint64_t seed,
                  bool find_max_distance) {
  SweepResult out;
  std::optional<SourceParams> warm;
  for (double d : distances) {
    out.points.push_back(optimize_at_distance(space, d, seed, warm));
    if (out.points.back().report.rate_per_pulse > 0.0) warm = out.points.back().params;
  }
  if (!find_max_distance || out.points.empty()) return out;

  const OptimizationResult* last_pos = nullptr;
  double first_zero = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : out.points) {
    if (p.report.rate_per_pulse > 0.0) last_pos = &p;
    else if (last_pos && std::isnan(first_zero)) first_zero = p.distance_km;
  }
  if (!last_pos) {
    out.max_distance_km = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double lo = last_pos->distance_km;
  SourceParams lo_params = last_pos->params;
  double hi = first_zero;
  if (std::isnan(hi)) {
    // extend past the grid until the rate vanishes
    hi = lo + 50.0;
    for (int guard = 0; guard < 40; ++guard, hi += 50.0) {
      const OptimizationResult r = optimize_at_distance(space, hi, seed, lo_params);
      if (r.report.rate_per_pulse <= 0.0) break;
      lo = hi;
      lo_params = r.params;
    }
  }
  out.max_distance_km = max_distance(space, seed, lo, lo_params, hi);
  return out;
}

} // namespace amdi

#include "amdi/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "amdi/errors.hpp"

namespace amdi {

const char* level_name(Level k) {
  switch (k) {
    case Level::Signal: return "xi";
    case Level::Nu: return "nu";
    case Level::Omega: return "w";
    case Level::Vacuum: return "o";
  }
  return "?";
}

double level_intensity(const SourceSpec& spec, Level k) {
  switch (k) {
    case Level::Signal: return spec.mu;
    case Level::Nu: return spec.nu;
    case Level::Omega: return spec.omega;
    case Level::Vacuum: return 0.0;
  }
  return 0.0;
}

double level_prob(const SourceSpec& spec, Level k) {
  switch (k) {
    case Level::Signal: return spec.p_signal;
    case Level::Nu: return spec.p_nu;
    case Level::Omega: return spec.p_omega;
    case Level::Vacuum: return std::max(0.0, spec.p_vacuum());
  }
  return 0.0;
}

bool is_filtered(Level a, Level b) {
  auto decoy = [](Level k) { return k == Level::Nu || k == Level::Omega; };
  if (a == Level::Signal && decoy(b)) return true;
  if (b == Level::Signal && decoy(a)) return true;
  return (a == Level::Nu && b == Level::Omega) || (a == Level::Omega && b == Level::Nu);
}

GainTable build_gain_table(const SourceSpec& spec_a, const SourceSpec& spec_b,
                           const DetectorModel& model, std::size_t cutoff) {
  GainTable g;
  const bool fock_a = spec_a.signal_kind == SignalKind::Cat;
  const bool fock_b = spec_b.signal_kind == SignalKind::Cat;
  std::optional<YieldTable> yields;
  if (fock_a || fock_b) yields.emplace(model, cutoff);

  for (Level a : kLevels) {
    for (Level b : kLevels) {
      const double ka = level_intensity(spec_a, a);
      const double kb = level_intensity(spec_b, b);
      const bool needs_fock = (a == Level::Signal && fock_a) || (b == Level::Signal && fock_b);
      double value;
      if (needs_fock) {
        const auto pa = a == Level::Signal ? signal_pnd(spec_a, cutoff) : wcs_pnd(ka, cutoff);
        const auto pb = b == Level::Signal ? signal_pnd(spec_b, cutoff) : wcs_pnd(kb, cutoff);
        const GainResult r = gain_generic(pa, pb, *yields);
        value = r.value;
        g.truncation_bound = std::max(g.truncation_bound, r.truncation_bound);
      } else {
        value = gain_wcs(ka, kb, model);
      }
      g.q[static_cast<int>(a)][static_cast<int>(b)] = value;
    }
  }
  return g;
}

void ProtocolTiming::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("timing: " + msg); };
  if (!(rep_rate_hz > 0.0)) fail("rep_rate_hz must be > 0");
  if (!(tc_seconds > 0.0)) fail("tc must be > 0");
  if (!(n_pulses >= 1.0)) fail("n_pulses must be >= 1");
  if (!(window_slots() >= 1.0)) fail("rep_rate_hz * tc must be >= 1 (Tc shorter than one pulse period)");
}

BinPair::BinPair(Level x, Level y) : first(std::min(x, y)), second(std::max(x, y)) {}

namespace {

std::string party_label(const BinPair& p) {
  if (p.first == Level::Vacuum && p.second == Level::Vacuum) return "o";
  if (p.second == Level::Vacuum) return level_name(p.first);
  if (p.first == p.second) return std::string("2") + level_name(p.first);
  return std::string(level_name(p.first)) + "+" + level_name(p.second);
}

bool party_discarded(const BinPair& p) {
  if (p.first != Level::Signal) return false;
  return p.second != Level::Vacuum;  // signal+signal or signal+decoy
}

} // namespace

std::string Category::label() const { return "[" + party_label(alice) + "," + party_label(bob) + "]"; }

bool Category::retained() const { return !party_discarded(alice) && !party_discarded(bob); }

namespace cat {
namespace {
Category mk(Level a1, Level a2, Level b1, Level b2) { return {BinPair(a1, a2), BinPair(b1, b2)}; }
constexpr Level S = Level::Signal, V = Level::Nu, W = Level::Omega, O = Level::Vacuum;
} // namespace
Category signal_signal() { return mk(S, O, S, O); }
Category vac_signal() { return mk(O, O, S, O); }
Category signal_vac() { return mk(S, O, O, O); }
Category nu_nu() { return mk(V, O, V, O); }
Category omega_omega() { return mk(W, O, W, O); }
Category vac_nu() { return mk(O, O, V, O); }
Category nu_vac() { return mk(V, O, O, O); }
Category vac_omega() { return mk(O, O, W, O); }
Category omega_vac() { return mk(W, O, O, O); }
Category vac_vac() { return mk(O, O, O, O); }
Category vac_2omega() { return mk(O, O, W, W); }
Category two_omega_vac() { return mk(W, W, O, O); }
Category two_omega_two_omega() { return mk(W, W, W, W); }
} // namespace cat

double filter_survival(const SourceSpec& a, const SourceSpec& b) {
  double ps = 1.0;
  for (Level x : kLevels)
    for (Level y : kLevels)
      if (is_filtered(x, y)) ps -= level_prob(a, x) * level_prob(b, y);
  return ps;
}

namespace {

// Calls f(e_a, e_b, l_a, l_b) for every early/late split of the category.
template <class F>
void for_each_decomposition(const Category& c, F&& f) {
  auto orders = [](const BinPair& p) {
    std::vector<std::pair<Level, Level>> v{{p.first, p.second}};
    if (p.first != p.second) v.emplace_back(p.second, p.first);
    return v;
  };
  for (const auto& [ea, la] : orders(c.alice))
    for (const auto& [eb, lb] : orders(c.bob)) f(ea, eb, la, lb);
}

} // namespace

double category_probability(const SourceSpec& a, const SourceSpec& b, const Category& c) {
  const double ps = filter_survival(a, b);
  if (!(ps > 0.0)) throw ConfigError("pairing: filter survival probability p_s must be > 0");
  double total = 0.0;
  for_each_decomposition(c, [&](Level ea, Level eb, Level la, Level lb) {
    total += (level_prob(a, ea) * level_prob(b, eb) / ps) * (level_prob(a, la) * level_prob(b, lb) / ps);
  });
  return total;
}

double x_category_probability(const SourceSpec& a, const SourceSpec& b, int phase_slices) {
  const double ps = filter_survival(a, b);
  if (!(ps > 0.0)) throw ConfigError("pairing: filter survival probability p_s must be > 0");
  const double w = a.p_omega * b.p_omega / ps;
  return 2.0 / static_cast<double>(phase_slices) * w * w;
}

double q_total(const SourceSpec& a, const SourceSpec& b, const GainTable& gains) {
  double sum = 0.0;
  for (Level x : kLevels)
    for (Level y : kLevels) sum += level_prob(a, x) * level_prob(b, y) * gains(x, y);
  // Remove the filtered cross terms.
  for (Level x : kLevels)
    for (Level y : kLevels)
      if (is_filtered(x, y)) sum -= level_prob(a, x) * level_prob(b, y) * gains(x, y);
  return std::max(0.0, sum);
}

double q_window(double q_tot, const ProtocolTiming& timing) {
  if (q_tot <= 0.0) return 0.0;
  if (q_tot >= 1.0) return 1.0;
  return -std::expm1(timing.window_slots() * std::log1p(-q_tot));
}

double total_pairs(const ProtocolTiming& timing, double q_tot, double q_tc) {
  if (q_tot <= 0.0 || q_tc <= 0.0) return 0.0;
  return timing.n_pulses * q_tot * q_tc / (1.0 + q_tc);
}

double mean_pair_time(const ProtocolTiming& timing, double q_tot) {
  if (!(q_tot > 0.0 && q_tot <= 1.0))
    throw DomainError("mean_pair_time: q_tot must lie in (0,1]");
  const double slots = timing.window_slots();
  // E[G | G <= K] for a geometric gap G, split as g(q) + K h(u) with
  // u = -K log(1-q); both pieces evaluated without cancellation.
  double g;
  if (q_tot >= 1.0) {
    g = 1.0;
  } else if (q_tot < 1e-4) {
    g = 0.5 + q_tot / 12.0 + q_tot * q_tot / 24.0;
  } else {
    g = 1.0 / q_tot + 1.0 / std::log1p(-q_tot);
  }
  double h;
  const double u = q_tot >= 1.0 ? INFINITY : -slots * std::log1p(-q_tot);
  if (!std::isfinite(u)) {
    h = 0.0;
  } else if (u < 1e-3) {
    h = 0.5 - u / 12.0 + u * u * u / 720.0;
  } else {
    h = 1.0 / u - 1.0 / std::expm1(u);
  }
  return (g + slots * h) / timing.rep_rate_hz;
}

double pair_count(const SourceSpec& a, const SourceSpec& b, const GainTable& gains, double q_tot,
                  double n_tot, const Category& c) {
  if (q_tot <= 0.0 || n_tot <= 0.0) return 0.0;
  auto click = [&](Level x, Level y) {
    if (is_filtered(x, y)) return 0.0;
    return level_prob(a, x) * level_prob(b, y) * gains(x, y) / q_tot;
  };
  double frac = 0.0;
  for_each_decomposition(c, [&](Level ea, Level eb, Level la, Level lb) {
    frac += click(ea, eb) * click(la, lb);
  });
  return n_tot * frac;
}

std::map<Category, double> pair_counts(const SourceSpec& a, const SourceSpec& b,
                                       const GainTable& gains, double q_tot, double n_tot) {
  if (!(filter_survival(a, b) > 0.0))
    throw ConfigError("pairing: filter survival probability p_s must be > 0");
  std::map<Category, double> out;
  for (const Category& c :
       {cat::signal_signal(), cat::vac_signal(), cat::signal_vac(), cat::nu_nu(), cat::omega_omega(),
        cat::vac_nu(), cat::nu_vac(), cat::vac_omega(), cat::omega_vac(), cat::vac_vac(),
        cat::vac_2omega(), cat::two_omega_vac()})
    out[c] = pair_count(a, b, gains, q_tot, n_tot, c);
  return out;
}

double x_pair_count(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                    double q_tot, double n_tot, const XBasisSettings& x) {
  if (q_tot <= 0.0 || n_tot <= 0.0) return 0.0;
  const double w = a.p_omega * b.p_omega / q_tot;
  const double avg = phase_average(
      [&](double theta) {
        const double f = w * click_probs_theta(a.omega, b.omega, theta, model).total();
        return f * f;
      },
      x.quadrature_points);
  return n_tot * 2.0 / static_cast<double>(x.phase_slices) * avg;
}

double x_error_count(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                     double q_tot, double n_tot, const XBasisSettings& x) {
  if (q_tot <= 0.0 || n_tot <= 0.0) return 0.0;
  const double w = a.p_omega * b.p_omega / q_tot;
  const double w2 = w * w;
  const double avg = phase_average(
      [&](double theta) {
        const ClickPair c0 = click_probs_theta(a.omega, b.omega, theta, model);
        const ClickPair c1 = click_probs_theta(a.omega, b.omega, theta + x.delta_drift, model);
        const double cross = c0.left * c1.right + c0.right * c1.left;
        const double same = c0.left * c1.left + c0.right * c1.right;
        return w2 * ((1.0 - x.e_hom) * cross + x.e_hom * same);
      },
      x.quadrature_points);
  return n_tot * 2.0 / static_cast<double>(x.phase_slices) * avg;
}

ZCounts z_counts(const SourceSpec& a, const SourceSpec& b, const GainTable& gains, double q_tot,
                 double n_tot) {
  ZCounts z;
  if (q_tot <= 0.0 || n_tot <= 0.0) return z;
  z.n_z = pair_count(a, b, gains, q_tot, n_tot, cat::signal_signal());
  const double ss = a.p_signal * b.p_signal * gains(Level::Signal, Level::Signal) / q_tot;
  const double oo =
      level_prob(a, Level::Vacuum) * level_prob(b, Level::Vacuum) * gains(Level::Vacuum, Level::Vacuum) / q_tot;
  z.m_z = n_tot * 2.0 * ss * oo;
  return z;
}

PairingStatistics compute_pairing_statistics(const PairingInputs& in) {
  return compute_pairing_statistics(
      in, build_gain_table(in.alice, in.bob, in.detector, in.photon_cutoff));
}

PairingStatistics compute_pairing_statistics(const PairingInputs& in, const GainTable& gains) {
  in.alice.validate();
  in.bob.validate();
  in.detector.validate();
  in.timing.validate();
  if (in.phase_slices < 1) throw ConfigError("pairing: phase_slices must be >= 1");
  if (!(in.e_hom >= 0.0 && in.e_hom <= 1.0)) throw ConfigError("pairing: e_hom must lie in [0,1]");

  PairingStatistics s;
  s.gains = gains;
  s.q_tot = q_total(in.alice, in.bob, gains);
  s.q_tc = q_window(s.q_tot, in.timing);
  s.n_tot = total_pairs(in.timing, s.q_tot, s.q_tc);
  s.t_mean = s.q_tot > 0.0 ? mean_pair_time(in.timing, s.q_tot) : 0.0;
  s.delta_drift = s.t_mean * (2.0 * std::numbers::pi * in.delta_nu + in.omega_fib);
  s.n_counts = pair_counts(in.alice, in.bob, gains, s.q_tot, s.n_tot);

  XBasisSettings x;
  x.phase_slices = in.phase_slices;
  x.e_hom = in.e_hom;
  x.delta_drift = s.delta_drift;
  x.quadrature_points = in.quadrature_points;
  s.n_x = x_pair_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x);
  s.m_x = x_error_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x);
  s.n_counts[cat::two_omega_two_omega()] = s.n_x;

  const ZCounts z = z_counts(in.alice, in.bob, gains, s.q_tot, s.n_tot);
  s.n_z = z.n_z;
  s.m_z = z.m_z;
  return s;
}

} // namespace amdi

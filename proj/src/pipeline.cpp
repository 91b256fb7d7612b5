#include "amdi/pipeline.hpp"

#include "amdi/errors.hpp"

namespace amdi {

void ProtocolConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("protocol: " + msg); };
  if (!(purity >= 0.0 && purity <= 1.0)) fail("purity must lie in [0,1]");
  if (!(epsilon > 0.0 && epsilon < 1.0)) fail("epsilon must lie in (0,1)");
  if (!(n_pulses >= 1.0)) fail("n_pulses must be >= 1");
  if (!(rep_rate_hz > 0.0)) fail("rep_rate_hz must be > 0");
  if (phase_slices < 1) fail("phase_slices must be >= 1");
  if (!(e_hom >= 0.0 && e_hom <= 1.0)) fail("e_hom must lie in [0,1]");
  if (!(f_ec >= 1.0)) fail("f_ec must be >= 1");
  if (photon_cutoff < 1) fail("photon_cutoff must be >= 1");
  if (quadrature_points < 8) fail("quadrature_points must be >= 8");
  make_detector(*this, 0.0).validate();
}

SourceParams SourceParams::from_array(const std::array<double, kDim>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

SourceSpec make_source(const ProtocolConfig& cfg, const SourceParams& p) {
  SourceSpec s;
  s.mu = p.mu;
  s.nu = p.nu;
  s.omega = p.omega;
  s.p_signal = p.p_signal;
  s.p_nu = p.p_nu;
  s.p_omega = p.p_omega;
  s.purity = cfg.signal_kind == SignalKind::Cat ? cfg.purity : 1.0;
  s.signal_kind = cfg.signal_kind;
  return s;
}

DetectorModel make_detector(const ProtocolConfig& cfg, double distance_km) {
  return {cfg.eta_d, cfg.p_d, cfg.alpha_db_per_km, distance_km};
}

ProtocolTiming make_timing(const ProtocolConfig& cfg, const SourceParams& p) {
  return {cfg.rep_rate_hz, p.tc_seconds, cfg.n_pulses};
}

PairingInputs make_pairing_inputs(const ProtocolConfig& cfg, const SourceParams& p, double distance_km) {
  PairingInputs in;
  in.alice = make_source(cfg, p);
  in.bob = in.alice;
  in.detector = make_detector(cfg, distance_km);
  in.timing = make_timing(cfg, p);
  in.phase_slices = cfg.phase_slices;
  in.e_hom = cfg.e_hom;
  in.omega_fib = cfg.omega_fib;
  in.delta_nu = cfg.delta_nu;
  in.quadrature_points = cfg.quadrature_points;
  in.photon_cutoff = cfg.photon_cutoff;
  return in;
}

KeyRateReport evaluate_key_rate(const ProtocolConfig& cfg, const SourceParams& params, double distance_km) {
  cfg.validate();
  const PairingInputs in = make_pairing_inputs(cfg, params, distance_km);
  const PairingStatistics stats = compute_pairing_statistics(in);

  FiniteKeyOptions fk;
  fk.eps_0 = fk.eps_1 = fk.eps_e = cfg.epsilon;
  fk.mode = cfg.fluctuation;
  fk.x_observed_conversion = cfg.x_observed_conversion;
  const DecoyEstimate est = estimate_decoy(stats, in.alice, in.bob, cfg.phase_slices, fk);
  KeyRateReport r = secret_key_rate(stats, est, EpsilonBudget::uniform(cfg.epsilon), in.timing, cfg.f_ec);
  r.plob = plob_bound(distance_km, cfg.alpha_db_per_km);
  return r;
}

} // namespace amdi

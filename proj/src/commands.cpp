#include "amdi/commands.hpp"

#include <cmath>
#include <limits>

#include "amdi/report.hpp"

namespace amdi {

using nlohmann::json;

namespace {

json document(const char* command, const RunConfig& cfg) {
  return {{"schema", kJsonSchema}, {"command", command}, {"config", config_json(cfg)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

RunConfig with_source(RunConfig cfg, SignalKind k) {
  cfg.protocol.signal_kind = k;
  return cfg;
}

} // namespace

double rate_ratio(double hybrid, double baseline) {
  if (baseline > 0.0) return hybrid / baseline;
  if (hybrid > 0.0) return std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::quiet_NaN();
}

CommandOutput cmd_rate(const RunConfig& cfg) {
  cfg.validate();
  const KeyRateReport r = evaluate_key_rate(cfg.protocol, cfg.params, cfg.distance_km);
  json doc = document("rate", cfg);
  doc["distance_km"] = cfg.distance_km;
  doc["params"] = params_json(cfg.params);
  doc["result"] = key_rate_json(r);
  return {dump(doc), r.decoy.ok ? kExitOk : kExitEstimation};
}

CommandOutput cmd_optimize(const RunConfig& cfg) {
  cfg.validate();
  const OptimizationResult r = optimize_at_distance(cfg.space(), cfg.distance_km, cfg.seed);
  json doc = document("optimize", cfg);
  doc["optimum"] = optimization_json(r);
  return {dump(doc), kExitOk};
}

CommandOutput cmd_sweep(const RunConfig& cfg) {
  cfg.validate();
  const SweepResult primary = sweep(cfg.space(), cfg.distances, cfg.seed, cfg.max_distance);
  std::optional<SweepResult> baseline;
  if (cfg.baseline)
    baseline = sweep(with_source(cfg, SignalKind::Wcs).space(), cfg.distances, cfg.seed, cfg.max_distance);
  return {sweep_csv(cfg, primary, baseline), kExitOk};
}

CommandOutput cmd_compare(const RunConfig& cfg) {
  cfg.validate();
  json doc = document("compare", cfg);
  json rows = json::array();
  for (double n : cfg.compare_n_pulses) {
    RunConfig c = cfg;
    c.protocol.n_pulses = n;
    const RunConfig h = with_source(c, SignalKind::Cat), w = with_source(c, SignalKind::Wcs);
    const OptimizationResult rh = optimize_at_distance(h.space(), c.compare_distance_km, c.seed);
    const OptimizationResult rw = optimize_at_distance(w.space(), c.compare_distance_km, c.seed);
    const SweepResult sh = sweep(h.space(), c.distances, c.seed, true);
    const SweepResult sw = sweep(w.space(), c.distances, c.seed, true);
    rows.push_back({{"n_pulses", n},
                    {"distance_km", c.compare_distance_km},
                    {"hybrid", optimization_json(rh)},
                    {"baseline", optimization_json(rw)},
                    {"rate_ratio", number_json(rate_ratio(rh.report.rate_per_pulse, rw.report.rate_per_pulse))},
                    {"hybrid_max_distance_km", number_json(sh.max_distance_km)},
                    {"baseline_max_distance_km", number_json(sw.max_distance_km)},
                    {"max_distance_ratio", number_json(rate_ratio(sh.max_distance_km, sw.max_distance_km))}});
  }
  doc["comparisons"] = rows;
  return {dump(doc), kExitOk};
}

CommandOutput cmd_mc_validate(const RunConfig& cfg) {
  cfg.validate();
  const PairingInputs in = make_pairing_inputs(cfg.protocol, cfg.params, cfg.distance_km);
  const PairingStatistics analytic = compute_pairing_statistics(in);
  const EmpiricalStats e = simulate(in.alice, in.bob, in.detector, in.timing, cfg.mc_pulses, cfg.seed);
  const ComparisonReport cmp = compare(in, analytic, e, cfg.mc_threshold);
  json doc = document("mc-validate", cfg);
  doc["distance_km"] = cfg.distance_km;
  doc["params"] = params_json(cfg.params);
  doc["empirical"] = empirical_json(e);
  doc["comparison"] = comparison_json(cmp);
  return {dump(doc), cmp.all_pass() ? kExitOk : kExitCheckFailed};
}

} // namespace amdi

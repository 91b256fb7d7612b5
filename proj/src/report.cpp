#include "amdi/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unistd.h>

#include "amdi/errors.hpp"

namespace amdi {

using nlohmann::json;

json number_json(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

json params_json(const SourceParams& p) {
  return {{"mu", p.mu},           {"nu", p.nu},       {"omega", p.omega},
          {"p_signal", p.p_signal}, {"p_nu", p.p_nu}, {"p_omega", p.p_omega},
          {"tc_seconds", p.tc_seconds}};
}

json config_json(const RunConfig& c) {
  const ProtocolConfig& p = c.protocol;
  json lo = json::array(), hi = json::array();
  for (std::size_t i = 0; i < SourceParams::kDim; ++i) lo.push_back(c.bounds.lo[i]), hi.push_back(c.bounds.hi[i]);
  return {
      {"source", {{"kind", source_name(p.signal_kind)}, {"purity", p.purity}, {"params", params_json(c.params)}}},
      {"detector", {{"eta_d", p.eta_d}, {"p_d", p.p_d}, {"alpha_db_per_km", p.alpha_db_per_km}}},
      {"protocol",
       {{"n_pulses", p.n_pulses},
        {"epsilon", p.epsilon},
        {"f_ec", p.f_ec},
        {"rep_rate_hz", p.rep_rate_hz},
        {"phase_slices", p.phase_slices},
        {"e_hom", p.e_hom},
        {"omega_fib", p.omega_fib},
        {"delta_nu", p.delta_nu},
        {"fluctuation", fluctuation_name(p.fluctuation)},
        {"x_observed_conversion", p.x_observed_conversion},
        {"photon_cutoff", p.photon_cutoff},
        {"quadrature_points", p.quadrature_points}}},
      {"run",
       {{"distance_km", c.distance_km},
        {"distances", c.distances},
        {"baseline", c.baseline},
        {"max_distance", c.max_distance},
        {"seed", c.seed}}},
      {"optimizer",
       {{"starts", c.optimizer.starts},
        {"max_evals", c.optimizer.max_evals},
        {"tolerance", c.optimizer.tolerance},
        {"min_p_vacuum", c.bounds.min_p_vacuum},
        {"signal_at_least_nu", c.bounds.signal_at_least_nu},
        {"lower", lo},
        {"upper", hi}}},
      {"compare", {{"distance_km", c.compare_distance_km}, {"n_pulses", c.compare_n_pulses}}},
      {"mc", {{"pulses", c.mc_pulses}, {"threshold", c.mc_threshold}}},
  };
}

json key_rate_json(const KeyRateReport& r) {
  const PairingStatistics& s = r.stats;
  const DecoyEstimate& d = r.decoy;
  json counts = json::object();
  for (const auto& [c, n] : s.n_counts) counts[c.label()] = n;
  return {
      {"rate_per_pulse", r.rate_per_pulse},
      {"rate_per_second", r.rate_per_second},
      {"rate_unclamped", r.rate_unclamped},
      {"key_bits", r.key_bits},
      {"lambda_ec", r.lambda_ec},
      {"e_z", r.e_z},
      {"eps_sec", r.eps_sec},
      {"eps_cor", r.eps_cor},
      {"plob", number_json(r.plob)},
      {"diagnostic", r.diagnostic},
      {"pairing",
       {{"q_tot", s.q_tot},
        {"q_tc", s.q_tc},
        {"n_tot", s.n_tot},
        {"t_mean", s.t_mean},
        {"delta_drift", s.delta_drift},
        {"n_x", s.n_x},
        {"m_x", s.m_x},
        {"n_z", s.n_z},
        {"m_z", s.m_z},
        {"gain_truncation_bound", s.gains.truncation_bound},
        {"counts", counts}}},
      {"decoy",
       {{"ok", d.ok},
        {"failure", d.failure},
        {"s0_z_lower", d.s0_z_lower},
        {"s11_z_lower", d.s11_z_lower},
        {"s11_x_lower", d.s11_x_lower},
        {"m0_x_lower", d.m0_x_lower},
        {"t11_x_upper", d.t11_x_upper},
        {"phi11_z_upper", d.phi11_z_upper},
        {"z_s1_lower", d.z_composites.s1_lower},
        {"z_s2_upper", d.z_composites.s2_upper},
        {"x_s1_lower", d.x_composites.s1_lower},
        {"x_s2_upper", d.x_composites.s2_upper}}},
  };
}

json optimization_json(const OptimizationResult& r) {
  return {{"distance_km", r.distance_km},
          {"params", params_json(r.params)},
          {"evaluations", r.evaluations},
          {"result", key_rate_json(r.report)}};
}

json empirical_json(const EmpiricalStats& e) {
  json cats = json::object();
  for (const auto& [c, n] : e.category_counts) cats[c.label()] = n;
  return {{"sample_size", e.sample_size},
          {"clicks", e.clicks},
          {"filtered_clicks", e.filtered_clicks},
          {"pairs", e.pairs},
          {"retained_pairs", e.retained_pairs},
          {"z_pairs", e.z_pairs},
          {"z_errors", e.z_errors},
          {"window_slots", e.window_slots},
          {"mean_pair_time", number_json(e.mean_pair_time())},
          {"gap_histogram", e.gap_histogram},
          {"category_counts", cats}};
}

json comparison_json(const ComparisonReport& c) {
  json entries = json::array();
  for (const auto& z : c.entries)
    entries.push_back({{"statistic", z.statistic},
                       {"analytic", number_json(z.analytic)},
                       {"empirical", number_json(z.empirical)},
                       {"std_error", number_json(z.std_error)},
                       {"z", number_json(z.z)},
                       {"pass", z.pass}});
  return {{"threshold", c.threshold}, {"all_pass", c.all_pass()}, {"entries", entries}};
}

namespace {

const char* kParamColumns[] = {"mu", "nu", "omega", "p_signal", "p_nu", "p_omega", "tc_seconds"};

void point_columns(std::ostringstream& os, const OptimizationResult* r) {
  if (!r) {
    os << std::string(10, ',');
    return;
  }
  os << ',' << format_number(r->report.rate_per_pulse) << ',' << format_number(r->report.rate_per_second);
  for (double v : r->params.as_array()) os << ',' << format_number(v);
  os << ',' << format_number(r->report.decoy.phi11_z_upper);
}

} // namespace

std::string sweep_csv(const RunConfig& cfg, const SweepResult& primary, const std::optional<SweepResult>& baseline) {
  const ProtocolConfig& p = cfg.protocol;
  std::ostringstream os;
  os << "# schema=" << kCsvSchema << '\n';
  os << "distance_km,rate_per_pulse,rate_per_second";
  for (const char* c : kParamColumns) os << ',' << c;
  os << ",phi";
  os << ",baseline_rate_per_pulse,baseline_rate_per_second";
  for (const char* c : kParamColumns) os << ",baseline_" << c;
  os << ",baseline_phi";
  os << ",plob,max_distance_km,baseline_max_distance_km"
        ",source,purity,n_pulses,epsilon,eps_sec,eps_cor,f_ec,eta_d,p_d,alpha_db_per_km,rep_rate_hz"
        ",phase_slices,e_hom,omega_fib,delta_nu,fluctuation,x_observed_conversion,optimizer_starts,seed\n";

  const EpsilonBudget eps = EpsilonBudget::uniform(p.epsilon);
  for (std::size_t i = 0; i < primary.points.size(); ++i) {
    const OptimizationResult& r = primary.points[i];
    const OptimizationResult* b = baseline && i < baseline->points.size() ? &baseline->points[i] : nullptr;
    os << format_number(r.distance_km);
    point_columns(os, &r);
    point_columns(os, b);
    os << ',' << format_number(plob_bound(r.distance_km, p.alpha_db_per_km)) << ','
       << (cfg.max_distance ? format_number(primary.max_distance_km) : "") << ','
       << (baseline && cfg.max_distance ? format_number(baseline->max_distance_km) : "") << ','
       << source_name(p.signal_kind) << ',' << format_number(p.purity) << ',' << format_number(p.n_pulses) << ','
       << format_number(p.epsilon) << ',' << format_number(epsilon_budget(eps)) << ','
       << format_number(eps.eps_cor) << ',' << format_number(p.f_ec) << ',' << format_number(p.eta_d) << ','
       << format_number(p.p_d) << ',' << format_number(p.alpha_db_per_km) << ',' << format_number(p.rep_rate_hz)
       << ',' << p.phase_slices << ',' << format_number(p.e_hom) << ',' << format_number(p.omega_fib) << ','
       << format_number(p.delta_nu) << ',' << fluctuation_name(p.fluctuation) << ','
       << (p.x_observed_conversion ? "true" : "false") << ',' << cfg.optimizer.starts << ',' << cfg.seed << '\n';
  }
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content << std::flush;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("output: cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) throw ConfigError("output: write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw ConfigError("output: cannot rename into '" + path + "': " + ec.message());
  }
}

} // namespace amdi

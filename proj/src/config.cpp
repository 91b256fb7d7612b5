#include "amdi/config.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include "amdi/errors.hpp"

namespace amdi {

namespace {

using Values = std::vector<std::string>;

double to_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec == std::errc() && ptr == v.data() + v.size()) return x;
  // integers written as 1e6
  const double d = to_double(key, v);
  if (!(d >= 0.0 && d < 1.8e19) || d != std::floor(d)) throw ConfigError(key + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(d);
}

// Microseconds to seconds by shifting the decimal exponent, so "0.315"
// yields exactly the double nearest to 0.315e-6.
double micro_to_seconds(const std::string& key, const std::string& v) {
  const auto e = v.find_first_of("eE");
  const std::string mantissa = v.substr(0, e);
  long exponent = 0;
  if (e != std::string::npos) {
    std::string ex = v.substr(e + 1);
    if (!ex.empty() && ex[0] == '+') ex.erase(0, 1);
    exponent = static_cast<long>(to_double(key, ex));
  }
  to_double(key, mantissa);
  return to_double(key, mantissa + "e" + std::to_string(exponent - 6));
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

const std::string& scalar(const std::string& key, const Values& v) {
  if (v.size() != 1) throw ConfigError(key + ": expected a single value");
  return v.front();
}

std::vector<double> to_list(const std::string& key, const Values& v) {
  std::vector<double> out;
  for (const auto& s : v)
    if (!s.empty()) out.push_back(to_double(key, s));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const Values&)>;

template <class F>
Setter number(F f) {
  return [f](RunConfig& c, const std::string& k, const Values& v) { f(c) = to_double(k, scalar(k, v)); };
}
template <class F>
Setter integer(F f) {
  return [f](RunConfig& c, const std::string& k, const Values& v) {
    f(c) = static_cast<std::remove_reference_t<decltype(f(c))>>(to_u64(k, scalar(k, v)));
  };
}
template <class F>
Setter boolean(F f) {
  return [f](RunConfig& c, const std::string& k, const Values& v) { f(c) = to_bool(k, scalar(k, v)); };
}

Setter bound_list(bool upper) {
  return [upper](RunConfig& c, const std::string& k, const Values& v) {
    const auto xs = to_list(k, v);
    if (xs.size() != SourceParams::kDim) throw ConfigError(k + ": expected 7 values (mu nu omega p_signal p_nu p_omega tc_us)");
    auto& dst = upper ? c.bounds.hi : c.bounds.lo;
    const auto raw = [&] {
      Values r;
      for (const auto& s : v)
        if (!s.empty()) r.push_back(s);
      return r;
    }();
    for (std::size_t i = 0; i < xs.size(); ++i) dst[i] = i == 6 ? micro_to_seconds(k, raw[i]) : xs[i];
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"source.kind", [](RunConfig& c, const std::string& k, const Values& v) {
         c.protocol.signal_kind = parse_source(scalar(k, v));
       }},
      {"source.purity", number([](RunConfig& c) -> double& { return c.protocol.purity; })},
      {"source.mu", number([](RunConfig& c) -> double& { return c.params.mu; })},
      {"source.nu", number([](RunConfig& c) -> double& { return c.params.nu; })},
      {"source.omega", number([](RunConfig& c) -> double& { return c.params.omega; })},
      {"source.p_signal", number([](RunConfig& c) -> double& { return c.params.p_signal; })},
      {"source.p_nu", number([](RunConfig& c) -> double& { return c.params.p_nu; })},
      {"source.p_omega", number([](RunConfig& c) -> double& { return c.params.p_omega; })},
      {"source.tc_us", [](RunConfig& c, const std::string& k, const Values& v) {
         c.params.tc_seconds = micro_to_seconds(k, scalar(k, v));
       }},
      {"detector.eta_d", number([](RunConfig& c) -> double& { return c.protocol.eta_d; })},
      {"detector.p_d", number([](RunConfig& c) -> double& { return c.protocol.p_d; })},
      {"detector.alpha_db_per_km", number([](RunConfig& c) -> double& { return c.protocol.alpha_db_per_km; })},
      {"protocol.n_pulses", number([](RunConfig& c) -> double& { return c.protocol.n_pulses; })},
      {"protocol.epsilon", number([](RunConfig& c) -> double& { return c.protocol.epsilon; })},
      {"protocol.f_ec", number([](RunConfig& c) -> double& { return c.protocol.f_ec; })},
      {"protocol.rep_rate_hz", number([](RunConfig& c) -> double& { return c.protocol.rep_rate_hz; })},
      {"protocol.phase_slices", integer([](RunConfig& c) -> int& { return c.protocol.phase_slices; })},
      {"protocol.e_hom", number([](RunConfig& c) -> double& { return c.protocol.e_hom; })},
      {"protocol.omega_fib", number([](RunConfig& c) -> double& { return c.protocol.omega_fib; })},
      {"protocol.delta_nu", number([](RunConfig& c) -> double& { return c.protocol.delta_nu; })},
      {"protocol.fluctuation", [](RunConfig& c, const std::string& k, const Values& v) {
         c.protocol.fluctuation = parse_fluctuation(scalar(k, v));
       }},
      {"protocol.x_observed_conversion",
       boolean([](RunConfig& c) -> bool& { return c.protocol.x_observed_conversion; })},
      {"protocol.photon_cutoff", integer([](RunConfig& c) -> std::size_t& { return c.protocol.photon_cutoff; })},
      {"protocol.quadrature_points",
       integer([](RunConfig& c) -> std::size_t& { return c.protocol.quadrature_points; })},
      {"run.distance_km", number([](RunConfig& c) -> double& { return c.distance_km; })},
      {"run.distances", [](RunConfig& c, const std::string& k, const Values& v) { c.distances = to_list(k, v); }},
      {"run.baseline", boolean([](RunConfig& c) -> bool& { return c.baseline; })},
      {"run.max_distance", boolean([](RunConfig& c) -> bool& { return c.max_distance; })},
      {"run.seed", integer([](RunConfig& c) -> std::uint64_t& { return c.seed; })},
      {"run.out", [](RunConfig& c, const std::string& k, const Values& v) { c.out_path = scalar(k, v); }},
      {"optimizer.starts", integer([](RunConfig& c) -> int& { return c.optimizer.starts; })},
      {"optimizer.max_evals", integer([](RunConfig& c) -> int& { return c.optimizer.max_evals; })},
      {"optimizer.tolerance", number([](RunConfig& c) -> double& { return c.optimizer.tolerance; })},
      {"optimizer.verbose", boolean([](RunConfig& c) -> bool& { return c.optimizer.verbose; })},
      {"optimizer.min_p_vacuum", number([](RunConfig& c) -> double& { return c.bounds.min_p_vacuum; })},
      {"optimizer.signal_at_least_nu", boolean([](RunConfig& c) -> bool& { return c.bounds.signal_at_least_nu; })},
      {"optimizer.lower", bound_list(false)},
      {"optimizer.upper", bound_list(true)},
      {"compare.distance_km", number([](RunConfig& c) -> double& { return c.compare_distance_km; })},
      {"compare.n_pulses",
       [](RunConfig& c, const std::string& k, const Values& v) { c.compare_n_pulses = to_list(k, v); }},
      {"mc.pulses", integer([](RunConfig& c) -> std::uint64_t& { return c.mc_pulses; })},
      {"mc.threshold", number([](RunConfig& c) -> double& { return c.mc_threshold; })},
  };
  return table;
}

} // namespace

const char* source_name(SignalKind k) { return k == SignalKind::Cat ? "hybrid" : "wcs"; }

SignalKind parse_source(const std::string& s) {
  if (s == "hybrid") return SignalKind::Cat;
  if (s == "wcs") return SignalKind::Wcs;
  throw ConfigError("source: expected 'hybrid' or 'wcs', got '" + s + "'");
}

Fluctuation parse_fluctuation(const std::string& s) {
  for (Fluctuation f : {Fluctuation::PerTerm, Fluctuation::Joint, Fluctuation::None})
    if (s == fluctuation_name(f)) return f;
  throw ConfigError("protocol.fluctuation: expected per-term, joint or none, got '" + s + "'");
}

void RunConfig::validate() const {
  protocol.validate();
  make_source(protocol, params).validate();
  make_timing(protocol, params).validate();
  if (!(distance_km >= 0.0)) throw ConfigError("run.distance_km must be >= 0");
  for (double d : distances)
    if (!(d >= 0.0)) throw ConfigError("run.distances must be >= 0");
  if (!(compare_distance_km >= 0.0)) throw ConfigError("compare.distance_km must be >= 0");
  for (double n : compare_n_pulses)
    if (!(n >= 1.0)) throw ConfigError("compare.n_pulses entries must be >= 1");
  if (optimizer.starts < 1) throw ConfigError("optimizer.starts must be >= 1");
  if (optimizer.max_evals < 1) throw ConfigError("optimizer.max_evals must be >= 1");
  if (!(optimizer.tolerance > 0.0)) throw ConfigError("optimizer.tolerance must be > 0");
  for (std::size_t i = 0; i < SourceParams::kDim; ++i)
    if (!(bounds.lo[i] > 0.0 && bounds.lo[i] <= bounds.hi[i]))
      throw ConfigError("optimizer bounds: need 0 < lower <= upper for every parameter");
  if (!(bounds.hi[3] < 1.0 && bounds.hi[4] < 1.0 && bounds.hi[5] < 1.0))
    throw ConfigError("optimizer bounds: probability upper bounds must be < 1");
  if (!(bounds.lo[6] * protocol.rep_rate_hz > 1.0))
    throw ConfigError("optimizer bounds: Tc lower bound must exceed one pulse period (Tc > 1/F)");
  if (!(bounds.min_p_vacuum > 0.0 && bounds.min_p_vacuum < 1.0))
    throw ConfigError("optimizer.min_p_vacuum must lie in (0,1)");
  if (mc_pulses < 10000) throw ConfigError("mc.pulses must be >= 10000");
  if (!(mc_threshold > 0.0)) throw ConfigError("mc.threshold must be > 0");
}

OptimizationSpace RunConfig::space() const {
  OptimizationSpace s;
  s.protocol = protocol;
  s.bounds = bounds;
  s.initial = params;
  s.settings = optimizer;
  return s;
}

RunConfig parse_config(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  RunConfig cfg;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    std::string key;
    for (const auto& p : item.parents) key += p + ".";
    key += item.name;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("config: unknown key '" + key + "'");
    it->second(cfg, key, item.inputs);
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(f);
}

} // namespace amdi

// amdi: key-rate engine command-line front end.
#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "amdi/commands.hpp"
#include "amdi/errors.hpp"
#include "amdi/report.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<double> distance;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> source;
  std::optional<double> purity;
  std::optional<double> n_pulses;
  bool verbose = false;
};

amdi::RunConfig resolve(const Overrides& o) {
  amdi::RunConfig cfg = o.config_path.empty() ? amdi::RunConfig{} : amdi::load_config(o.config_path);
  if (o.distance) cfg.distance_km = *o.distance;
  if (o.out) cfg.out_path = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.source) cfg.protocol.signal_kind = amdi::parse_source(*o.source);
  if (o.purity) cfg.protocol.purity = *o.purity;
  if (o.n_pulses) cfg.protocol.n_pulses = *o.n_pulses;
  if (o.verbose) cfg.optimizer.verbose = true;
  return cfg;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous MDI-QKD key-rate engine (hybrid cat/WCS source)"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  app.add_option("--config", o.config_path, "TOML-style configuration file")->check(CLI::ExistingFile);
  app.add_option("--distance", o.distance, "Fiber distance in km");
  app.add_option("--out", o.out, "Output file (default: stdout)");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--source", o.source, "Signal source")->check(CLI::IsMember({"hybrid", "wcs"}));
  app.add_option("--purity", o.purity, "Cat-state odd-photon weight a");
  app.add_option("--n-pulses", o.n_pulses, "Number of pulses N");
  app.add_flag("-v,--verbose", o.verbose, "Optimizer progress on stderr");

  using Cmd = amdi::CommandOutput (*)(const amdi::RunConfig&);
  Cmd selected = nullptr;
  auto sub = [&](const char* name, const char* help, Cmd fn) {
    app.add_subcommand(name, help)->callback([&selected, fn] { selected = fn; });
  };
  sub("rate", "Key rate at one parameter point (JSON)", amdi::cmd_rate);
  sub("optimize", "Optimise source parameters at one distance (JSON)", amdi::cmd_optimize);
  sub("sweep", "Optimised rate over the distance grid (CSV)", amdi::cmd_sweep);
  sub("compare", "Hybrid vs baseline rate and reach ratios (JSON)", amdi::cmd_compare);
  sub("mc-validate", "Monte-Carlo check of the pairing statistics (JSON)", amdi::cmd_mc_validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? amdi::kExitOk : amdi::kExitConfig;
  }

  try {
    const amdi::RunConfig cfg = resolve(o);
    const amdi::CommandOutput out = selected(cfg);
    amdi::write_atomic(cfg.out_path, out.content);
    return out.exit_code;
  } catch (const amdi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return amdi::kExitConfig;
  } catch (const amdi::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return amdi::kExitConfig;
  } catch (const amdi::EstimationError& e) {
    std::cerr << "estimation failure: " << e.what() << '\n';
    return amdi::kExitEstimation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return amdi::kExitCheckFailed;
  }
}

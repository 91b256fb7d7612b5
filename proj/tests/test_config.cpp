#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "amdi/commands.hpp"
#include "amdi/errors.hpp"
#include "amdi/report.hpp"

using namespace amdi;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST_CASE("empty document gives the defaults") {
  const RunConfig c = parse("");
  const RunConfig d;
  CHECK(config_json(c) == config_json(d));
}

TEST_CASE("shipped defaults file equals the built-in defaults") {
  const RunConfig c = load_config(AMDI_DEFAULTS_TOML);
  CHECK(config_json(c).dump() == config_json(RunConfig{}).dump());
}

TEST_CASE("sections and value types") {
  const RunConfig c = parse(R"(
[source]
kind = "wcs"
purity = 0.7
tc_us = 0.4

[detector]
eta_d = 0.6

[protocol]
n_pulses = 1e14
fluctuation = "joint"
x_observed_conversion = true

[run]
distances = [0, 10, 20]
seed = 99
baseline = false
)");
  CHECK(c.protocol.signal_kind == SignalKind::Wcs);
  CHECK(c.protocol.purity == 0.7);
  CHECK(c.params.tc_seconds == 0.4e-6);
  CHECK(c.protocol.eta_d == 0.6);
  CHECK(c.protocol.n_pulses == 1e14);
  CHECK(c.protocol.fluctuation == Fluctuation::Joint);
  CHECK(c.protocol.x_observed_conversion);
  CHECK(c.distances == std::vector<double>{0, 10, 20});
  CHECK(c.seed == 99);
  CHECK_FALSE(c.baseline);
}

TEST_CASE("unknown and malformed entries are config errors") {
  CHECK_THROWS_AS(parse("[source]\nmuu = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nowhere]\nmu = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[source]\nmu = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse("[source]\nkind = \"laser\"\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nbaseline = 3\n"), ConfigError);
  CHECK_THROWS_AS(parse("[run]\nseed = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[mc]\npulses = 10\n").validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/amdi.toml"), ConfigError);
}

TEST_CASE("invalid physics is rejected at validation") {
  RunConfig c = parse("[source]\nnu = 0.01\nomega = 0.02\n");
  CHECK_THROWS_AS(cmd_rate(c), ConfigError);
  CHECK_THROWS_AS(parse("[optimizer]\nstarts = 0\n").validate(), ConfigError);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "1.0000000000000001e-01");
  CHECK(format_number(0.0) == "0.0000000000000000e+00");
  CHECK(number_json(INFINITY) == "inf");
  CHECK(number_json(-INFINITY) == "-inf");
  CHECK(number_json(NAN) == "nan");
  CHECK(number_json(2.5) == 2.5);
}

TEST_CASE("rate ratio sentinels") {
  CHECK(rate_ratio(2.0, 1.0) == 2.0);
  CHECK(std::isinf(rate_ratio(1.0, 0.0)));
  CHECK(std::isnan(rate_ratio(0.0, 0.0)));
}

TEST_CASE("csv on an empty grid is header only") {
  RunConfig c;
  c.distances.clear();
  const std::string csv = sweep_csv(c, SweepResult{}, std::nullopt);
  std::istringstream in(csv);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  CHECK(l1 == std::string("# schema=") + kCsvSchema);
  CHECK(l2.rfind("distance_km,", 0) == 0);
  CHECK_FALSE(std::getline(in, l3));
}

TEST_CASE("csv rows have as many fields as the header") {
  RunConfig c;
  SweepResult s;
  OptimizationResult p;
  p.distance_km = 10;
  p.params = SourceParams{};
  s.points.push_back(p);
  s.max_distance_km = 123;
  const std::string csv = sweep_csv(c, s, std::nullopt);
  std::istringstream in(csv);
  std::string l1, header, row;
  std::getline(in, l1);
  std::getline(in, header);
  std::getline(in, row);
  CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("1.0000000000000000e+01,", 0) == 0);
}

TEST_CASE("atomic write replaces the target and leaves no temporaries") {
  const auto dir = std::filesystem::temp_directory_path() / "amdi_atomic_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto f = dir / "out.json";
  write_atomic(f.string(), "first\n");
  write_atomic(f.string(), "second\n");
  CHECK(slurp(f) == "second\n");
  int n = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++n;
  CHECK(n == 1);
  CHECK_THROWS(write_atomic((dir / "missing" / "x.json").string(), "x"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("rate report is deterministic and versioned") {
  const RunConfig c;
  const CommandOutput a = cmd_rate(c), b = cmd_rate(c);
  CHECK(a.content == b.content);
  CHECK(a.exit_code == kExitOk);
  const auto j = nlohmann::json::parse(a.content);
  CHECK(j.at("schema") == kJsonSchema);
  CHECK(j.contains("config"));
}

TEST_CASE("rate outside the secure regime reports an estimation failure") {
  RunConfig c;
  c.distance_km = 400;
  CHECK(cmd_rate(c).exit_code == kExitEstimation);
}

#include <doctest.h>

#include <cmath>

#include "amdi/errors.hpp"
#include "amdi/mc_oracle.hpp"
#include "amdi/pipeline.hpp"

using namespace amdi;

namespace {

PairingInputs inputs(double km, SignalKind kind = SignalKind::Cat) {
  ProtocolConfig cfg;
  cfg.signal_kind = kind;
  return make_pairing_inputs(cfg, SourceParams{}, km);
}

} // namespace

TEST_CASE("shards are reproducible and seed dependent") {
  const PairingInputs in = inputs(0);
  const auto a = simulate_shard(in.alice, in.bob, in.detector, 1000, 50000, 3, 0);
  const auto b = simulate_shard(in.alice, in.bob, in.detector, 1000, 50000, 3, 0);
  const auto c = simulate_shard(in.alice, in.bob, in.detector, 1000, 50000, 3, 1);
  REQUIRE(!a.empty());
  REQUIRE(a.size() == b.size());
  bool same = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    same = same && a[i].n == b[i].n && a[i].k_a == b[i].k_a && a[i].click == b[i].click && a[i].theta_a == b[i].theta_a;
  CHECK(same);
  CHECK((a.size() != c.size() || a.front().n != c.front().n));
  std::uint64_t prev = 0;
  for (const auto& e : a) {
    CHECK(e.n >= 1000);
    CHECK(e.n < 51000);
    CHECK(e.n >= prev);
    CHECK((e.click == ClickOutcome::Left || e.click == ClickOutcome::Right));
    prev = e.n;
  }
}

TEST_CASE("signal share of clicks follows the gain table") {
  const PairingInputs in = inputs(0);
  const GainTable g = build_gain_table(in.alice, in.bob, in.detector);
  double all = 0, sig = 0;
  for (Level x : kLevels)
    for (Level y : kLevels) {
      const double w = level_prob(in.alice, x) * level_prob(in.bob, y) * g(x, y);
      all += w;
      if (x == Level::Signal) sig += w;
    }
  const auto ev = simulate_shard(in.alice, in.bob, in.detector, 0, 400000, 8, 0);
  double hits = 0;
  for (const auto& e : ev) hits += e.k_a == Level::Signal;
  const double p = sig / all, n = double(ev.size());
  CHECK(std::abs(hits / n - p) < 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST_CASE("vacuum pulses click only through dark counts") {
  const PairingInputs in = inputs(0);
  const auto ev = simulate_shard(in.alice, in.bob, in.detector, 0, 200000, 4, 0);
  int dark = 0;
  for (const auto& e : ev) dark += e.k_a == Level::Vacuum && e.k_b == Level::Vacuum;
  CHECK(dark <= 2);
}

TEST_CASE("parallel and serial simulation agree exactly") {
  for (SignalKind k : {SignalKind::Cat, SignalKind::Wcs}) {
    const PairingInputs in = inputs(0, k);
    const EmpiricalStats a = simulate(in.alice, in.bob, in.detector, in.timing, 600000, 21);
    const EmpiricalStats b = simulate_serial(in.alice, in.bob, in.detector, in.timing, 600000, 21);
    CHECK(a == b);
    CHECK(a.sample_size == 600000);
  }
}

TEST_CASE("sample size below the minimum is rejected") {
  const PairingInputs in = inputs(0);
  CHECK_THROWS_AS(simulate(in.alice, in.bob, in.detector, in.timing, 100, 1), ConfigError);
}

TEST_CASE("bookkeeping is consistent") {
  const PairingInputs in = inputs(0);
  const EmpiricalStats e = simulate(in.alice, in.bob, in.detector, in.timing, 1000000, 2);
  std::uint64_t total = 0, hist = 0;
  for (const auto& [c, n] : e.category_counts) total += n;
  for (auto h : e.gap_histogram) hist += h;
  CHECK(total == e.pairs);
  CHECK(hist == e.pairs);
  CHECK(e.retained_pairs <= e.pairs);
  CHECK(e.filtered_clicks <= e.clicks);
  CHECK(2 * e.pairs <= e.filtered_clicks);
  CHECK(e.z_errors <= e.z_pairs);
  CHECK(e.window_slots == std::llround(in.timing.window_slots()));
  CHECK(e.mean_pair_time() > 0.0);
  CHECK(e.mean_pair_time() <= in.timing.tc_seconds);
}

TEST_CASE("empirical statistics agree with the analytic model") {
  for (double km : {0.0, 100.0}) {
    const PairingInputs in = inputs(km);
    const PairingStatistics s = compute_pairing_statistics(in);
    const EmpiricalStats e = simulate(in.alice, in.bob, in.detector, in.timing, 2000000, 77);
    const ComparisonReport r = compare(in, s, e, 4.0);
    CHECK(r.entries.size() >= 4);
    for (const ZScore& z : r.entries) {
      INFO(z.statistic << " z=" << z.z);
      CHECK(z.pass);
    }
  }
}

TEST_CASE("coherent baseline also agrees") {
  const PairingInputs in = inputs(0, SignalKind::Wcs);
  const PairingStatistics s = compute_pairing_statistics(in);
  const EmpiricalStats e = simulate(in.alice, in.bob, in.detector, in.timing, 2000000, 78);
  CHECK(compare(in, s, e, 4.0).all_pass());
}

TEST_CASE("comparison detects a wrong model") {
  const PairingInputs in = inputs(0);
  PairingInputs wrong = in;
  wrong.detector.eta_d *= 0.5;
  const EmpiricalStats e = simulate(in.alice, in.bob, in.detector, in.timing, 2000000, 5);
  const ComparisonReport r = compare(wrong, compute_pairing_statistics(wrong), e, 3.0);
  CHECK_FALSE(r.all_pass());
}

TEST_CASE("comparison of an empty sample is a domain error") {
  const PairingInputs in = inputs(0);
  CHECK_THROWS_AS(compare(in, compute_pairing_statistics(in), EmpiricalStats{}), DomainError);
}

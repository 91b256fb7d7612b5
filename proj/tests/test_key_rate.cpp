#include <doctest.h>

#include <cmath>

#include "amdi/errors.hpp"
#include "amdi/pipeline.hpp"

using namespace amdi;

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.11) == doctest::Approx(0.4999).epsilon(1e-3));
  CHECK(binary_entropy(0.2) == doctest::Approx(binary_entropy(0.8)));
}

TEST_CASE("error-correction leakage") {
  CHECK(lambda_ec(1000.0, 0.0, 1.1) == 0.0);
  CHECK(lambda_ec(1000.0, 50.0, 1.1) == doctest::Approx(1000.0 * 1.1 * binary_entropy(0.05)));
  CHECK(lambda_ec(0.0, 0.0, 1.1) == 0.0);
}

TEST_CASE("repeaterless bound") {
  CHECK(plob_bound(100.0) == doctest::Approx(-std::log2(1.0 - std::pow(10.0, -1.6))));
  CHECK(plob_bound(500.0) == doctest::Approx(std::pow(10.0, -8.0) / std::log(2.0)).epsilon(1e-6));
  CHECK(plob_bound(400.0) < plob_bound(300.0));
}

TEST_CASE("security budget") {
  CHECK(epsilon_budget(EpsilonBudget::uniform(1e-10)) == doctest::Approx(1.2e-9));
  EpsilonBudget e = EpsilonBudget::uniform(1e-10);
  e.eps_e = 2e-10;
  CHECK(epsilon_budget(e) == doctest::Approx(1.6e-9));
}

TEST_CASE("rate assembly from given estimates") {
  PairingStatistics s;
  s.n_z = 1e6;
  s.m_z = 1e4;
  DecoyEstimate d;
  d.s0_z_lower = 1e4;
  d.s11_z_lower = 5e5;
  d.phi11_z_upper = 0.02;
  ProtocolTiming t;
  t.n_pulses = 1e10;
  const KeyRateReport r = secret_key_rate(s, d, EpsilonBudget::uniform(1e-10), t, 1.1);
  const double overhead = std::log2(2e10) + 2.0 * std::log2(2e20) + 2.0 * std::log2(5e9);
  const double bits = 1e4 + 5e5 * (1.0 - binary_entropy(0.02)) - 1e6 * 1.1 * binary_entropy(0.01) - overhead;
  CHECK(r.key_bits == doctest::Approx(bits));
  CHECK(r.rate_per_pulse == doctest::Approx(bits / 1e10));
  CHECK(r.rate_per_second == doctest::Approx(bits / 1e10 * 1e9));
  CHECK(r.e_z == doctest::Approx(0.01));
  CHECK(r.eps_sec == doctest::Approx(1.2e-9));
  CHECK(r.diagnostic.empty());
}

TEST_CASE("negative key clamps at zero with a diagnostic") {
  PairingStatistics s;
  s.n_z = 1e4;
  s.m_z = 2e3;
  DecoyEstimate d;
  d.s11_z_lower = 1e2;
  d.phi11_z_upper = 0.3;
  const KeyRateReport r = secret_key_rate(s, d, EpsilonBudget::uniform(1e-10), ProtocolTiming{}, 1.1);
  CHECK(r.rate_per_pulse == 0.0);
  CHECK(r.rate_unclamped < 0.0);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("failed decoy estimate yields zero rate") {
  PairingStatistics s;
  s.n_z = 1e6;
  DecoyEstimate d;
  d.ok = false;
  d.failure = "x";
  d.s11_z_lower = 1e6;
  const KeyRateReport r = secret_key_rate(s, d, EpsilonBudget::uniform(1e-10), ProtocolTiming{}, 1.1);
  CHECK(r.rate_per_pulse == 0.0);
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("end-to-end rate at the reference operating points") {
  ProtocolConfig cfg;
  struct Row {
    double km;
    SourceParams p;
  };
  const Row rows[] = {
      {0, {0.088, 0.087, 0.036, 0.333, 0.007, 0.038, 0.315e-6}},
      {200, {0.104, 0.103, 0.039, 0.276, 0.015, 0.093, 0.397e-6}},
      {400, {0.180, 0.179, 0.051, 0.225, 0.026, 0.209, 0.425e-6}},
  };
  double prev = INFINITY;
  for (const Row& r : rows) {
    const KeyRateReport k = evaluate_key_rate(cfg, r.p, r.km);
    CHECK(k.rate_per_pulse > 0.0);
    CHECK(k.rate_per_pulse < prev);
    CHECK(k.decoy.ok);
    prev = k.rate_per_pulse;
  }
}

TEST_CASE("rate decreases with distance at fixed parameters") {
  ProtocolConfig cfg;
  SourceParams p;
  double prev = INFINITY;
  for (double km = 0; km <= 150; km += 25) {
    const double r = evaluate_key_rate(cfg, p, km).rate_per_pulse;
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("more pulses never lowers the rate") {
  ProtocolConfig cfg;
  SourceParams p{0.104, 0.103, 0.039, 0.276, 0.015, 0.093, 0.397e-6};
  cfg.n_pulses = 1e12;
  const double a = evaluate_key_rate(cfg, p, 200).rate_per_pulse;
  cfg.n_pulses = 1e14;
  const double b = evaluate_key_rate(cfg, p, 200).rate_per_pulse;
  CHECK(b >= a);
}

TEST_CASE("invalid configuration is rejected") {
  ProtocolConfig cfg;
  SourceParams p;
  p.nu = 0.01;
  p.omega = 0.02;
  CHECK_THROWS_AS(evaluate_key_rate(cfg, p, 0), ConfigError);
  cfg = ProtocolConfig{};
  cfg.eta_d = 1.5;
  CHECK_THROWS_AS(evaluate_key_rate(cfg, SourceParams{}, 0), ConfigError);
  CHECK_THROWS_AS(evaluate_key_rate(ProtocolConfig{}, SourceParams{}, -1.0), ConfigError);
}

TEST_CASE("phase error regression at the reference points") {
  ProtocolConfig cfg;
  CHECK(evaluate_key_rate(cfg, SourceParams{}, 0).decoy.phi11_z_upper == doctest::Approx(0.0652308).epsilon(1e-5));
  const SourceParams p400{0.180, 0.179, 0.051, 0.225, 0.026, 0.209, 0.425e-6};
  CHECK(evaluate_key_rate(cfg, p400, 400).decoy.phi11_z_upper == doctest::Approx(0.248243).epsilon(1e-5));
}

#include <doctest.h>

#include <cmath>

#include "amdi/errors.hpp"
#include "amdi/pipeline.hpp"
#include "oracles.hpp"

using namespace amdi;

namespace {

PairingInputs row0(double km = 0.0) {
  ProtocolConfig cfg;
  return make_pairing_inputs(cfg, SourceParams{}, km);
}

ProtocolTiming timing(double slots, double f = 1e9) {
  ProtocolTiming t;
  t.rep_rate_hz = f;
  t.tc_seconds = slots / f;
  return t;
}

} // namespace

TEST_CASE("click filtering drops signal-decoy and nu-omega coincidences") {
  CHECK(is_filtered(Level::Signal, Level::Nu));
  CHECK(is_filtered(Level::Omega, Level::Signal));
  CHECK(is_filtered(Level::Nu, Level::Omega));
  CHECK(is_filtered(Level::Omega, Level::Nu));
  CHECK_FALSE(is_filtered(Level::Signal, Level::Signal));
  CHECK_FALSE(is_filtered(Level::Signal, Level::Vacuum));
  CHECK_FALSE(is_filtered(Level::Nu, Level::Nu));
  CHECK_FALSE(is_filtered(Level::Vacuum, Level::Omega));
}

TEST_CASE("q_tot is the full sum minus the six filtered cross terms") {
  const PairingInputs in = row0(100);
  const GainTable g = build_gain_table(in.alice, in.bob, in.detector);
  const auto& a = in.alice;
  const auto& b = in.bob;
  double full = 0.0;
  for (Level x : kLevels)
    for (Level y : kLevels) full += level_prob(a, x) * level_prob(b, y) * g(x, y);
  const double cut = a.p_signal * b.p_nu * g(Level::Signal, Level::Nu) +
                     a.p_nu * b.p_signal * g(Level::Nu, Level::Signal) +
                     a.p_signal * b.p_omega * g(Level::Signal, Level::Omega) +
                     a.p_omega * b.p_signal * g(Level::Omega, Level::Signal) +
                     a.p_nu * b.p_omega * g(Level::Nu, Level::Omega) +
                     a.p_omega * b.p_nu * g(Level::Omega, Level::Nu);
  CHECK(q_total(a, b, g) == doctest::Approx(full - cut).epsilon(1e-14));
}

TEST_CASE("decoy gains equal the coherent-state closed form") {
  const PairingInputs in = row0(200);
  const GainTable g = build_gain_table(in.alice, in.bob, in.detector);
  CHECK(g(Level::Nu, Level::Omega) == doctest::Approx(gain_wcs(in.alice.nu, in.bob.omega, in.detector)).epsilon(1e-9));
  CHECK(g(Level::Vacuum, Level::Vacuum) == doctest::Approx(gain_wcs(0, 0, in.detector)).epsilon(1e-12));
}

TEST_CASE("pairing window probability") {
  CHECK(q_window(0.01, timing(100)) == doctest::Approx(1.0 - std::pow(0.99, 100)).epsilon(1e-13));
  CHECK(q_window(1e-12, timing(300)) == doctest::Approx(300e-12).epsilon(1e-9));
  CHECK(q_window(0.0, timing(300)) == 0.0);
}

TEST_CASE("total pairs: N q / (1 + 1/q_Tc)") {
  ProtocolTiming t = timing(100);
  t.n_pulses = 1e12;
  const double q = 0.01, qt = q_window(q, t);
  CHECK(total_pairs(t, q, qt) == doctest::Approx(1e12 * q / (1.0 + 1.0 / qt)).epsilon(1e-14));
}

TEST_CASE("mean pair time matches the defining series") {
  CHECK(mean_pair_time(timing(100), 0.01) ==
        doctest::Approx(oracle::mean_pair_time_series(0.01, 100, 1e9)).epsilon(1e-12));
  for (double q : {1e-9, 1e-6, 3e-5, 1e-4, 2e-3, 0.3, 0.9})
    for (long n : {1L, 2L, 315L, 20000L})
      CHECK(mean_pair_time(timing(double(n)), q) ==
            doctest::Approx(oracle::mean_pair_time_series(q, n, 1e9)).epsilon(1e-10));
}

TEST_CASE("mean pair time equals the closed form (1 - N q (1/q_Tc - 1)) / (F q)") {
  const ProtocolTiming t = timing(315);
  for (double q : {0.01, 0.2, 0.44}) {
    const double qt = q_window(q, t);
    CHECK(mean_pair_time(t, q) == doctest::Approx((1.0 - 315.0 * q * (1.0 / qt - 1.0)) / (1e9 * q)).epsilon(1e-9));
  }
}

TEST_CASE("mean pair time limits") {
  // tiny q: uniform gap over the window
  CHECK(mean_pair_time(timing(1000), 1e-12) == doctest::Approx(500.5e-9).epsilon(1e-8));
  // window of one slot
  CHECK(mean_pair_time(timing(1), 0.3) == doctest::Approx(1e-9).epsilon(1e-12));
  CHECK_THROWS_AS(mean_pair_time(timing(10), 0.0), DomainError);
}

TEST_CASE("category labels and retention") {
  CHECK(cat::signal_signal().label() == "[xi,xi]");
  CHECK(cat::vac_2omega().label() == "[o,2w]");
  CHECK(cat::vac_vac().label() == "[o,o]");
  CHECK(cat::signal_signal().retained());
  const Category ss{BinPair(Level::Signal, Level::Signal), BinPair(Level::Vacuum, Level::Vacuum)};
  const Category sd{BinPair(Level::Signal, Level::Nu), BinPair(Level::Vacuum, Level::Vacuum)};
  CHECK_FALSE(ss.retained());
  CHECK_FALSE(sd.retained());
}

TEST_CASE("category send probabilities") {
  const PairingInputs in = row0();
  const auto& a = in.alice;
  const double ps = filter_survival(a, in.bob);
  const double expect_ps = 1.0 - 2.0 * a.p_signal * (a.p_nu + a.p_omega) - 2.0 * a.p_nu * a.p_omega;
  CHECK(ps == doctest::Approx(expect_ps).epsilon(1e-14));
  const double p_ss = category_probability(a, in.bob, cat::signal_signal());
  const double w = a.p_signal * a.p_vacuum() / ps;
  CHECK(p_ss == doctest::Approx(4.0 * w * w).epsilon(1e-14));
  CHECK(x_category_probability(a, in.bob, 16) == doctest::Approx(2.0 / 16.0 * std::pow(a.p_omega * a.p_omega / ps, 2)));
}

TEST_CASE("all pair categories partition the pairs") {
  const PairingInputs in = row0(150);
  const auto s = compute_pairing_statistics(in);
  double total = 0.0;
  for (std::size_t a1 = 0; a1 < 4; ++a1)
    for (std::size_t a2 = a1; a2 < 4; ++a2)
      for (std::size_t b1 = 0; b1 < 4; ++b1)
        for (std::size_t b2 = b1; b2 < 4; ++b2)
          total += pair_count(in.alice, in.bob, s.gains, s.q_tot, s.n_tot,
                              {BinPair(kLevels[a1], kLevels[a2]), BinPair(kLevels[b1], kLevels[b2])});
  CHECK(total == doctest::Approx(s.n_tot).epsilon(1e-12));
}

TEST_CASE("Z-basis counts") {
  const PairingInputs in = row0(200);
  const auto s = compute_pairing_statistics(in);
  CHECK(s.n_z == s.n_counts.at(cat::signal_signal()));
  const auto& g = s.gains;
  const double pss = in.alice.p_signal * in.bob.p_signal * g(Level::Signal, Level::Signal);
  const double poo = in.alice.p_vacuum() * in.bob.p_vacuum() * g(Level::Vacuum, Level::Vacuum);
  CHECK(s.m_z == doctest::Approx(s.n_tot * 2.0 * pss * poo / (s.q_tot * s.q_tot)).epsilon(1e-13));
}

TEST_CASE("X-basis errors without misalignment come only from cross-detector products") {
  const PairingInputs in = row0(100);
  const auto s = compute_pairing_statistics(in);
  XBasisSettings x;
  x.e_hom = 0.0;
  x.delta_drift = 0.0;
  const double w = in.alice.p_omega * in.bob.p_omega / s.q_tot;
  const double anti = s.n_tot * 2.0 / 16.0 * phase_average([&](double th) {
    const auto c = click_probs_theta(in.alice.omega, in.bob.omega, th, in.detector);
    return w * w * 2.0 * c.left * c.right;
  });
  CHECK(x_error_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x) == doctest::Approx(anti).epsilon(1e-10));
}

TEST_CASE("misalignment of one half gives half errors") {
  const PairingInputs in = row0(100);
  const auto s = compute_pairing_statistics(in);
  XBasisSettings x;
  x.e_hom = 0.5;
  x.delta_drift = 0.0;
  const double n = x_pair_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x);
  CHECK(x_error_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x) == doctest::Approx(n / 2).epsilon(1e-10));
}

TEST_CASE("phase drift raises the X error count") {
  const PairingInputs in = row0(100);
  const auto s = compute_pairing_statistics(in);
  XBasisSettings x;
  const double m0 = x_error_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x);
  x.delta_drift = 0.3;
  CHECK(x_error_count(in.alice, in.bob, in.detector, s.q_tot, s.n_tot, x) > m0);
}

TEST_CASE("drift offset follows the mean pair time") {
  PairingInputs in = row0(100);
  in.delta_nu = 1000.0;
  const auto s = compute_pairing_statistics(in);
  CHECK(s.delta_drift == doctest::Approx(s.t_mean * (2.0 * std::numbers::pi * 1000.0 + 5900.0)).epsilon(1e-14));
}

TEST_CASE("pairing statistics reject invalid inputs") {
  PairingInputs in = row0();
  in.e_hom = 2.0;
  CHECK_THROWS_AS(compute_pairing_statistics(in), ConfigError);
  in = row0();
  in.timing.tc_seconds = 0.5e-9;
  CHECK_THROWS_AS(compute_pairing_statistics(in), ConfigError);
}

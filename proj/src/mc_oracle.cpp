#include "amdi/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "amdi/errors.hpp"

namespace amdi {

namespace {

using Cdf = std::vector<double>;

Cdf make_cdf(const std::vector<double>& probs) {
  Cdf c(probs.size());
  std::partial_sum(probs.begin(), probs.end(), c.begin());
  return c;
}

std::size_t draw(const Cdf& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u * cdf.back());
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

// Per-party sampling tables: level choice and photon number per level.
struct PartySampler {
  Cdf levels;
  std::array<double, 4> intensity{};
  std::array<Cdf, 4> photons;
  bool cat_signal = false;

  PartySampler(const SourceSpec& s, std::size_t cutoff) {
    std::vector<double> p;
    for (Level k : kLevels) p.push_back(level_prob(s, k));
    levels = make_cdf(p);
    cat_signal = s.signal_kind == SignalKind::Cat;
    for (Level k : kLevels) {
      const int i = static_cast<int>(k);
      intensity[i] = level_intensity(s, k);
      const auto pnd = k == Level::Signal ? signal_pnd(s, cutoff) : wcs_pnd(intensity[i], cutoff);
      photons[i] = make_cdf(pnd.probs);
    }
  }
};

std::mt19937_64 shard_rng(std::uint64_t seed, std::uint64_t shard) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
  return std::mt19937_64(seq);
}

ClickOutcome from_bits(bool left, bool right) {
  if (left && right) return ClickOutcome::Both;
  if (left) return ClickOutcome::Left;
  if (right) return ClickOutcome::Right;
  return ClickOutcome::None;
}

std::vector<PulseEvent> run_shard(const PartySampler& sa, const PartySampler& sb, const DetectorModel& model,
                                  const BeamsplitterTable& bs, std::uint64_t first, std::uint64_t count,
                                  std::uint64_t seed, std::uint64_t shard) {
  std::mt19937_64 rng = shard_rng(seed, shard);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double eta = model.eta();
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<PulseEvent> out;
  std::vector<double> row_cdf;

  for (std::uint64_t n = first; n < first + count; ++n) {
    PulseEvent ev;
    ev.n = n;
    ev.k_a = kLevels[draw(sa.levels, uni(rng))];
    ev.k_b = kLevels[draw(sb.levels, uni(rng))];
    ev.theta_a = two_pi * uni(rng);
    ev.theta_b = two_pi * uni(rng);
    ev.r_a = uni(rng) < 0.5 ? 0 : 1;
    ev.r_b = uni(rng) < 0.5 ? 0 : 1;
    const int ia = static_cast<int>(ev.k_a), ib = static_cast<int>(ev.k_b);
    const bool fock = (ev.k_a == Level::Signal && sa.cat_signal) || (ev.k_b == Level::Signal && sb.cat_signal);

    if (!fock) {
      const double theta = ev.theta_a + ev.r_a * std::numbers::pi - ev.theta_b - ev.r_b * std::numbers::pi;
      const ClickPair c = click_probs_theta(sa.intensity[ia], sb.intensity[ib], theta, model);
      const double u = uni(rng);
      ev.click = u < c.left ? ClickOutcome::Left : (u < c.total() ? ClickOutcome::Right : ClickOutcome::None);
    } else {
      // photon numbers, beamsplitter routing, then per-detector loss and dark counts
      const std::size_t i = draw(sa.photons[ia], uni(rng));
      const std::size_t j = draw(sb.photons[ib], uni(rng));
      const double* row = bs.row(i, j);
      row_cdf.assign(row, row + i + j + 1);
      std::partial_sum(row_cdf.begin(), row_cdf.end(), row_cdf.begin());
      const std::size_t p = draw(row_cdf, uni(rng));
      const double d_left = 1.0 - (1.0 - model.p_d) * std::pow(1.0 - eta, static_cast<double>(p));
      const double d_right = 1.0 - (1.0 - model.p_d) * std::pow(1.0 - eta, static_cast<double>(i + j - p));
      const bool left = uni(rng) < d_left;
      const bool right = uni(rng) < d_right;
      ev.click = from_bits(left, right);
    }
    if (ev.click == ClickOutcome::Left || ev.click == ClickOutcome::Right) out.push_back(ev);
  }
  return out;
}

// Sequential T_c pairing over the click stream, carried across shards.
class PairingQueue {
public:
  PairingQueue(EmpiricalStats& s, std::uint64_t window, std::size_t bins) : s_(s), window_(window) {
    s_.window_slots = window;
    s_.gap_histogram.assign(bins, 0);
  }

  void push(const PulseEvent& ev) {
    ++s_.clicks;
    if (is_filtered(ev.k_a, ev.k_b)) return;
    ++s_.filtered_clicks;
    if (open_ && ev.n - open_ev_.n <= window_) {
      record(open_ev_, ev);
      open_ = false;
    } else {
      open_ev_ = ev;
      open_ = true;
    }
  }

private:
  void record(const PulseEvent& e, const PulseEvent& l) {
    const std::uint64_t gap = l.n - e.n;
    ++s_.pairs;
    s_.gap_sum += static_cast<double>(gap);
    s_.gap_sumsq += static_cast<double>(gap) * static_cast<double>(gap);
    if (!s_.gap_histogram.empty()) {
      const std::size_t bins = s_.gap_histogram.size();
      ++s_.gap_histogram[std::min(bins - 1, static_cast<std::size_t>((gap - 1) * bins / window_))];
    }
    const Category c{BinPair(e.k_a, l.k_a), BinPair(e.k_b, l.k_b)};
    ++s_.category_counts[c];
    if (!c.retained()) return;
    ++s_.retained_pairs;
    if (c == cat::signal_signal()) {
      ++s_.z_pairs;
      // both signals in the same bin leave the other bin to dark counts
      if ((e.k_a == Level::Signal) == (e.k_b == Level::Signal)) ++s_.z_errors;
    }
  }

  EmpiricalStats& s_;
  std::uint64_t window_;
  bool open_ = false;
  PulseEvent open_ev_;
};

void check_inputs(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model, const ProtocolTiming& timing,
                  std::uint64_t sample_size) {
  a.validate();
  b.validate();
  model.validate();
  timing.validate();
  if (sample_size < kMcMinSamples) throw ConfigError("mc: sample size must be at least 10000 pulses");
}

EmpiricalStats run(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                   const ProtocolTiming& timing, std::uint64_t sample_size, std::uint64_t seed,
                   const McOptions& opt, bool parallel) {
  check_inputs(a, b, model, timing, sample_size);
  const PartySampler sa(a, opt.photon_cutoff), sb(b, opt.photon_cutoff);
  const BeamsplitterTable& bs = BeamsplitterTable::shared(opt.photon_cutoff);

  EmpiricalStats s;
  s.sample_size = sample_size;
  s.rep_rate_hz = timing.rep_rate_hz;
  const auto window = static_cast<std::uint64_t>(std::max<long long>(1, std::llround(timing.window_slots())));
  PairingQueue queue(s, window, opt.histogram_bins);

  const std::uint64_t shards = (sample_size + kMcShardPulses - 1) / kMcShardPulses;
  const std::uint64_t batch = 16;
  std::vector<std::vector<PulseEvent>> clicks(batch);
  for (std::uint64_t b0 = 0; b0 < shards; b0 += batch) {
    const auto nb = static_cast<long long>(std::min(batch, shards - b0));
    auto one = [&](long long k) {
      const std::uint64_t shard = b0 + static_cast<std::uint64_t>(k);
      const std::uint64_t first = shard * kMcShardPulses;
      const std::uint64_t count = std::min(kMcShardPulses, sample_size - first);
      clicks[k] = run_shard(sa, sb, model, bs, first, count, seed, shard);
    };
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 1)
      for (long long k = 0; k < nb; ++k) one(k);
    } else {
      for (long long k = 0; k < nb; ++k) one(k);
    }
    for (long long k = 0; k < nb; ++k)
      for (const PulseEvent& ev : clicks[k]) queue.push(ev);
  }
  return s;
}

double binomial_se(double p, double n) { return n > 0.0 ? std::sqrt(std::max(0.0, p * (1.0 - p)) / n) : NAN; }
double ratio(double x, double n) { return n > 0.0 ? x / n : NAN; }

} // namespace

double EmpiricalStats::click_rate() const { return ratio(double(filtered_clicks), double(sample_size)); }
double EmpiricalStats::click_rate_se() const { return binomial_se(click_rate(), double(sample_size)); }
double EmpiricalStats::pair_rate() const { return ratio(double(pairs), double(sample_size)); }
double EmpiricalStats::pair_rate_se() const { return binomial_se(pair_rate(), double(sample_size)); }

double EmpiricalStats::category_fraction(const Category& c) const {
  const auto it = category_counts.find(c);
  return ratio(it == category_counts.end() ? 0.0 : double(it->second), double(pairs));
}
double EmpiricalStats::category_fraction_se(const Category& c) const {
  return binomial_se(category_fraction(c), double(pairs));
}

double EmpiricalStats::mean_pair_time() const { return ratio(gap_sum, double(pairs)) / rep_rate_hz; }
double EmpiricalStats::mean_pair_time_se() const {
  if (pairs < 2) return NAN;
  const double n = double(pairs), m = gap_sum / n;
  const double var = std::max(0.0, (gap_sumsq - n * m * m) / (n - 1.0));
  return std::sqrt(var / n) / rep_rate_hz;
}

double EmpiricalStats::z_error_fraction() const { return ratio(double(z_errors), double(z_pairs)); }
double EmpiricalStats::z_error_fraction_se() const { return binomial_se(z_error_fraction(), double(z_pairs)); }

std::vector<PulseEvent> simulate_shard(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                                       std::uint64_t first_pulse, std::uint64_t count, std::uint64_t seed,
                                       std::uint64_t shard, const McOptions& opt) {
  a.validate();
  b.validate();
  model.validate();
  const PartySampler sa(a, opt.photon_cutoff), sb(b, opt.photon_cutoff);
  return run_shard(sa, sb, model, BeamsplitterTable::shared(opt.photon_cutoff), first_pulse, count, seed, shard);
}

EmpiricalStats simulate(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                        const ProtocolTiming& timing, std::uint64_t sample_size, std::uint64_t seed,
                        const McOptions& opt) {
  return run(a, b, model, timing, sample_size, seed, opt, true);
}

EmpiricalStats simulate_serial(const SourceSpec& a, const SourceSpec& b, const DetectorModel& model,
                               const ProtocolTiming& timing, std::uint64_t sample_size, std::uint64_t seed,
                               const McOptions& opt) {
  return run(a, b, model, timing, sample_size, seed, opt, false);
}

bool ComparisonReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const ZScore& z) { return z.pass; });
}

namespace {

// Binomial z-score under the analytic (null) proportion.
ZScore binomial_z(std::string name, double analytic, double empirical, double trials, double threshold) {
  ZScore z;
  z.statistic = std::move(name);
  z.analytic = analytic;
  z.empirical = empirical;
  z.std_error = binomial_se(analytic, trials);
  if (z.std_error > 0.0) z.z = (empirical - analytic) / z.std_error;
  else z.z = empirical == analytic ? 0.0 : INFINITY;
  z.pass = std::abs(z.z) < threshold;
  return z;
}

} // namespace

ComparisonReport compare(const PairingInputs& in, const PairingStatistics& analytic, const EmpiricalStats& e,
                         double threshold) {
  if (e.sample_size == 0 || e.pairs == 0) throw DomainError("compare: empirical sample is empty");
  if (!(analytic.n_tot > 0.0)) throw DomainError("compare: analytic pair count is zero");
  ComparisonReport r;
  r.threshold = threshold;
  const double pulses = double(e.sample_size), pairs = double(e.pairs);

  r.entries.push_back(binomial_z("click_rate", analytic.q_tot, e.click_rate(), pulses, threshold));
  r.entries.push_back(
      binomial_z("pair_rate", analytic.n_tot / in.timing.n_pulses, e.pair_rate(), pulses, threshold));

  for (std::size_t a1 = 0; a1 < 4; ++a1)
    for (std::size_t a2 = a1; a2 < 4; ++a2)
      for (std::size_t b1 = 0; b1 < 4; ++b1)
        for (std::size_t b2 = b1; b2 < 4; ++b2) {
          const Category c{BinPair(kLevels[a1], kLevels[a2]), BinPair(kLevels[b1], kLevels[b2])};
          const double f =
              pair_count(in.alice, in.bob, analytic.gains, analytic.q_tot, analytic.n_tot, c) / analytic.n_tot;
          // too few expected pairs for the normal approximation
          if (f * pairs < 10.0) continue;
          r.entries.push_back(binomial_z("category " + c.label(), f, e.category_fraction(c), pairs, threshold));
        }

  ZScore t;
  t.statistic = "mean_pair_time";
  t.analytic = analytic.t_mean;
  t.empirical = e.mean_pair_time();
  t.std_error = e.mean_pair_time_se();
  t.z = t.std_error > 0.0 ? (t.empirical - t.analytic) / t.std_error : (t.empirical == t.analytic ? 0.0 : INFINITY);
  t.pass = std::abs(t.z) < threshold;
  r.entries.push_back(t);

  if (e.z_pairs > 0 && analytic.n_z > 0.0)
    r.entries.push_back(binomial_z("z_error_fraction", analytic.m_z / analytic.n_z, e.z_error_fraction(),
                                   double(e.z_pairs), threshold));
  return r;
}

} // namespace amdi

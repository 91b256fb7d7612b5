#include "amdi/detection.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <sstream>

#include "amdi/errors.hpp"

namespace amdi {

double DetectorModel::eta() const {
  return eta_d * std::pow(10.0, -alpha_db_per_km * distance_km / 20.0);
}

void DetectorModel::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("detector: " + msg); };
  if (!(eta_d > 0.0 && eta_d <= 1.0)) fail("eta_d must lie in (0,1]");
  if (!(p_d >= 0.0 && p_d < 1.0)) fail("p_d must lie in [0,1)");
  if (!(alpha_db_per_km > 0.0)) fail("alpha_db_per_km must be > 0");
  if (!(distance_km >= 0.0) || !std::isfinite(distance_km)) fail("distance_km must be finite and >= 0");
}

double transmittance(const DetectorModel& model) { return model.eta(); }

ClickPair click_probs_theta(double k_a, double k_b, double theta, const DetectorModel& model) {
  const double eta = model.eta();
  const double half = 0.5 * eta * (k_a + k_b);
  const double cross = eta * std::sqrt(k_a * k_b) * std::cos(theta);
  const double log_quiet = std::log1p(-model.p_d);
  const double quiet = 1.0 - model.p_d;
  // silent(R) * fires(L), silent(L) * fires(R)
  ClickPair out;
  out.left = quiet * std::exp(-half + cross) * -std::expm1(log_quiet - half - cross);
  out.right = quiet * std::exp(-half - cross) * -std::expm1(log_quiet - half + cross);
  return out;
}

double bessel_i0_minus_one(double x) {
  const double q = 0.25 * x * x;
  if (x > 40.0) return std::cyl_bessel_i(0.0, x) - 1.0;
  double term = 1.0;
  double sum = 0.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k));
    sum += term;
    if (term <= sum * 1e-17) break;
  }
  return sum;
}

double gain_wcs(double k_a, double k_b, const DetectorModel& model) {
  if (k_a < 0.0 || k_b < 0.0) throw DomainError("gain_wcs: intensities must be >= 0");
  const double eta = model.eta();
  const double half = 0.5 * eta * (k_a + k_b);
  const double y = eta * std::sqrt(k_a * k_b);
  const double quiet = 1.0 - model.p_d;
  return 2.0 * quiet * std::exp(-half) *
         (bessel_i0_minus_one(y) - std::expm1(std::log1p(-model.p_d) - half));
}

namespace {

// Applies (a_L^dag + sign * a_R^dag) / sqrt(2) to a state with `m` photons,
// then divides by sqrt(count) so repeated application stays normalised.
void apply_creation(std::vector<double>& amp, std::size_t m, double sign, std::size_t count) {
  std::vector<double> next(m + 2, 0.0);
  for (std::size_t p = 0; p <= m + 1; ++p) {
    double v = 0.0;
    if (p >= 1) v += std::sqrt(static_cast<double>(p)) * amp[p - 1];
    if (p <= m) v += sign * std::sqrt(static_cast<double>(m + 1 - p)) * amp[p];
    next[p] = v;
  }
  const double scale = 1.0 / std::sqrt(2.0 * static_cast<double>(count));
  for (double& v : next) v *= scale;
  amp.swap(next);
}

} // namespace

std::vector<FockOutcome> fock_interference_distribution(long i, long j) {
  if (i < 0 || j < 0) throw DomainError("fock_interference_distribution: photon counts must be >= 0");
  std::vector<double> amp{1.0};
  std::size_t m = 0;
  for (long a = 0; a < i; ++a, ++m) apply_creation(amp, m, +1.0, static_cast<std::size_t>(a) + 1);
  for (long b = 0; b < j; ++b, ++m) apply_creation(amp, m, -1.0, static_cast<std::size_t>(b) + 1);
  std::vector<FockOutcome> out(amp.size());
  for (std::size_t p = 0; p < amp.size(); ++p) out[p] = {p, amp[p] * amp[p]};
  return out;
}

BeamsplitterTable::BeamsplitterTable(std::size_t cutoff) : cutoff_(cutoff) {
  const std::size_t dim = cutoff + 1;
  offsets_.resize(dim * dim);
  std::size_t total = 0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      offsets_[i * dim + j] = total;
      total += i + j + 1;
    }
  data_.resize(total);

  // Share the A-photon prefix across every j.
  std::vector<double> base{1.0};
  for (std::size_t i = 0; i < dim; ++i) {
    if (i > 0) apply_creation(base, i - 1, +1.0, i);
    std::vector<double> amp = base;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j > 0) apply_creation(amp, i + j - 1, -1.0, j);
      double* dst = data_.data() + offsets_[i * dim + j];
      for (std::size_t p = 0; p <= i + j; ++p) dst[p] = amp[p] * amp[p];
    }
  }
}

const BeamsplitterTable& BeamsplitterTable::shared(std::size_t cutoff) {
  static std::mutex mu;
  static std::vector<std::unique_ptr<BeamsplitterTable>> tables;
  std::lock_guard<std::mutex> lock(mu);
  for (const auto& t : tables)
    if (t->cutoff() >= cutoff) return *t;
  tables.push_back(std::make_unique<BeamsplitterTable>(cutoff));
  return *tables.back();
}

namespace {

// silent[n] = (1 - p_d)(1 - eta)^n, fire[n] = 1 - silent[n].
void detector_powers(const DetectorModel& model, std::size_t n_max, std::vector<double>& silent,
                     std::vector<double>& fire) {
  const double eta = model.eta();
  const double log_quiet = std::log1p(-model.p_d);
  const double log_pass = eta >= 1.0 ? -INFINITY : std::log1p(-eta);
  silent.resize(n_max + 1);
  fire.resize(n_max + 1);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double lg = n == 0 ? log_quiet : log_quiet + static_cast<double>(n) * log_pass;
    silent[n] = std::exp(lg);
    fire[n] = -std::expm1(lg);
  }
}

FockYield yield_from_row(const double* row, std::size_t n, const std::vector<double>& silent,
                         const std::vector<double>& fire) {
  FockYield y;
  for (std::size_t p = 0; p <= n; ++p) {
    y.left += fire[p] * silent[n - p] * row[p];
    y.right += silent[p] * fire[n - p] * row[p];
  }
  return y;
}

} // namespace

FockYield fock_yields(std::size_t i, std::size_t j, const DetectorModel& model) {
  const std::size_t n = i + j;
  std::vector<double> silent, fire;
  detector_powers(model, n, silent, fire);
  const std::size_t need = std::max(i, j);
  if (need <= kDefaultPhotonCutoff) {
    return yield_from_row(BeamsplitterTable::shared(kDefaultPhotonCutoff).row(i, j), n, silent, fire);
  }
  const auto dist = fock_interference_distribution(static_cast<long>(i), static_cast<long>(j));
  std::vector<double> row(dist.size());
  for (std::size_t p = 0; p < dist.size(); ++p) row[p] = dist[p].prob;
  return yield_from_row(row.data(), n, silent, fire);
}

YieldTable::YieldTable(const DetectorModel& model, std::size_t cutoff)
    : cutoff_(cutoff), yields_((cutoff + 1) * (cutoff + 1)) {
  const BeamsplitterTable& bs = BeamsplitterTable::shared(cutoff);
  std::vector<double> silent, fire;
  detector_powers(model, 2 * cutoff, silent, fire);
  const long dim = static_cast<long>(cutoff + 1);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < dim; ++i) fill_row(static_cast<std::size_t>(i), silent, fire, bs);
}

YieldTable::YieldTable(const DetectorModel& model, std::size_t cutoff, SerialTag)
    : cutoff_(cutoff), yields_((cutoff + 1) * (cutoff + 1)) {
  const BeamsplitterTable& bs = BeamsplitterTable::shared(cutoff);
  std::vector<double> silent, fire;
  detector_powers(model, 2 * cutoff, silent, fire);
  for (std::size_t i = 0; i <= cutoff; ++i) fill_row(i, silent, fire, bs);
}

YieldTable YieldTable::build_serial(const DetectorModel& model, std::size_t cutoff) {
  return YieldTable(model, cutoff, SerialTag{});
}

void YieldTable::fill_row(std::size_t i, const std::vector<double>& silent,
                          const std::vector<double>& fire, const BeamsplitterTable& bs) {
  for (std::size_t j = 0; j <= cutoff_; ++j)
    yields_[i * (cutoff_ + 1) + j] = yield_from_row(bs.row(i, j), i + j, silent, fire);
}

GainResult gain_generic(const PhotonNumberDistribution& pnd_a, const PhotonNumberDistribution& pnd_b,
                        const YieldTable& table) {
  const std::size_t ca = std::min(pnd_a.cutoff(), table.cutoff());
  const std::size_t cb = std::min(pnd_b.cutoff(), table.cutoff());
  GainResult g;
  for (std::size_t i = 0; i <= ca; ++i) {
    const double pa = pnd_a.probs[i];
    if (pa == 0.0) continue;
    double row = 0.0;
    for (std::size_t j = 0; j <= cb; ++j) row += pnd_b.probs[j] * table.at(i, j).total();
    g.value += pa * row;
  }
  // Yields are probabilities, so dropped mass bounds the dropped gain.
  double dropped_a = pnd_a.tail_mass, dropped_b = pnd_b.tail_mass;
  for (std::size_t i = ca + 1; i <= pnd_a.cutoff(); ++i) dropped_a += pnd_a.probs[i];
  for (std::size_t j = cb + 1; j <= pnd_b.cutoff(); ++j) dropped_b += pnd_b.probs[j];
  g.truncation_bound = dropped_a + dropped_b;
  return g;
}

GainResult gain_generic(const PhotonNumberDistribution& pnd_a, const PhotonNumberDistribution& pnd_b,
                        const DetectorModel& model) {
  const std::size_t cutoff = std::max<std::size_t>(
      1, std::min(kDefaultPhotonCutoff, std::max(pnd_a.cutoff(), pnd_b.cutoff())));
  return gain_generic(pnd_a, pnd_b, YieldTable(model, cutoff));
}

} // namespace amdi

#include "synccool/observables.hpp"

#include <algorithm>
#include <cmath>

#include "synccool/errors.hpp"
#include "synccool/model.hpp"

namespace synccool {

void TimeSeries::add_channel(std::string name, std::vector<double> values) {
  if (values.size() != times.size()) {
    throw ConsistencyError("channel '" + name + "' length differs from the time grid");
  }
  if (has(name)) throw ConsistencyError("duplicate channel '" + name + "'");
  channels.emplace_back(std::move(name), std::move(values));
}

bool TimeSeries::has(const std::string& name) const {
  return std::any_of(channels.begin(), channels.end(),
                     [&](const auto& c) { return c.first == name; });
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  for (const auto& [key, values] : channels) {
    if (key == name) return values;
  }
  throw ConsistencyError("no channel named '" + name + "'");
}

std::vector<double>& TimeSeries::channel(const std::string& name) {
  return const_cast<std::vector<double>&>(std::as_const(*this).channel(name));
}

void TimeSeries::validate() const {
  for (const auto& [name, values] : channels) {
    if (values.size() != times.size()) {
      throw ConsistencyError("channel '" + name + "' length differs from the time grid");
    }
    if (name.ends_with("_stderr")) {
      for (double v : values) {
        if (v < 0.0) throw ConsistencyError("negative value in '" + name + "'");
      }
    }
  }
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double pairwise_mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return pairwise_sum(values) / static_cast<double>(values.size());
}

Moments moments(std::span<const double> samples, std::size_t group_size) {
  if (samples.size() < 2) throw InvalidParameter("moments: need at least two samples");
  if (group_size == 0 || samples.size() % group_size != 0) {
    throw InvalidParameter("moments: sample count is not a multiple of the group size");
  }
  const std::size_t groups = samples.size() / group_size;
  std::vector<double> g2(groups), g4(groups), buf(group_size);
  for (std::size_t g = 0; g < groups; ++g) {
    const auto block = samples.subspan(g * group_size, group_size);
    for (std::size_t i = 0; i < group_size; ++i) buf[i] = block[i] * block[i];
    g2[g] = pairwise_mean(buf);
    for (std::size_t i = 0; i < group_size; ++i) buf[i] *= buf[i];
    g4[g] = pairwise_mean(buf);
  }
  return moments_from_group_means(g2, g4);
}

Moments moments_from_group_means(std::span<const double> group_p2,
                                 std::span<const double> group_p4) {
  if (group_p2.size() != group_p4.size() || group_p2.empty()) {
    throw ConsistencyError("moments: group moment arrays differ in length or are empty");
  }
  const std::size_t groups = group_p2.size();
  const double total2 = pairwise_sum(group_p2);
  const double total4 = pairwise_sum(group_p4);
  const auto G = static_cast<double>(groups);

  Moments m;
  m.p2 = total2 / G;
  m.p4 = total4 / G;
  if (m.p2 == 0.0) throw UndefinedKurtosis("moments: all samples are zero");
  m.kurtosis = m.p4 / (m.p2 * m.p2);
  if (groups < 2) return m;

  // delete-one-group jackknife
  std::vector<double> j2(groups), j4(groups), jk(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    j2[g] = (total2 - group_p2[g]) / (G - 1.0);
    j4[g] = (total4 - group_p4[g]) / (G - 1.0);
    jk[g] = j2[g] > 0.0 ? j4[g] / (j2[g] * j2[g]) : m.kurtosis;
  }
  auto jackknife_error = [&](const std::vector<double>& est) {
    const double mean = pairwise_mean(est);
    std::vector<double> sq(groups);
    for (std::size_t g = 0; g < groups; ++g) sq[g] = (est[g] - mean) * (est[g] - mean);
    return std::sqrt((G - 1.0) / G * pairwise_sum(sq));
  };
  m.p2_stderr = jackknife_error(j2);
  m.p4_stderr = jackknife_error(j4);
  m.kurtosis_stderr = jackknife_error(jk);
  return m;
}

MeanError mean_and_stderr(std::span<const double> values) {
  MeanError r;
  if (values.empty()) return r;
  r.mean = pairwise_mean(values);
  if (values.size() < 2) return r;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - r.mean) * (values[i] - r.mean);
  const auto n = static_cast<double>(values.size());
  r.error = std::sqrt(pairwise_sum(sq) / (n - 1.0) / n);
  return r;
}

std::vector<double> frequency_grid(double lo, double hi, std::size_t n) {
  if (n < 2 || !(hi > lo)) throw InvalidParameter("frequency_grid: need n >= 2 and hi > lo");
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

Spectrum laplace_spectrum(std::span<const double> times, std::span<const double> values,
                          double window_fraction, std::span<const double> omega) {
  if (!(window_fraction > 0.0 && window_fraction < 1.0)) {
    throw InvalidParameter("laplace_spectrum: window fraction must lie in (0, 1)");
  }
  if (times.size() != values.size()) {
    throw ConsistencyError("laplace_spectrum: times and values differ in length");
  }
  const std::size_t n = times.size();
  if (n < 16) throw InvalidParameter("laplace_spectrum: need at least 16 samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InvalidParameter("laplace_spectrum: times must be strictly increasing");
    }
  }

  Spectrum out;
  out.omega = omega.empty() ? frequency_grid() : std::vector<double>(omega.begin(), omega.end());

  const double t_cut = times[n - 1] - window_fraction * (times[n - 1] - times[0]);
  std::vector<double> tail;
  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] >= t_cut) tail.push_back(values[i]);
  }
  out.stationary_value = pairwise_mean(tail);

  std::vector<double> dev(n), weight(n);
  double max_abs = 0.0, max_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    dev[i] = values[i] - out.stationary_value;
    max_abs = std::max(max_abs, std::abs(values[i]));
    max_dev = std::max(max_dev, std::abs(dev[i]));
    const double left = i > 0 ? times[i] - times[i - 1] : 0.0;
    const double right = i + 1 < n ? times[i + 1] - times[i] : 0.0;
    weight[i] = 0.5 * (left + right);
  }
  // A constant series only differs from its own mean by rounding.
  const bool constant = max_dev <= 1e-13 * max_abs;

  out.values.assign(out.omega.size(), {0.0, 0.0});
  if (constant) return out;
  for (std::size_t k = 0; k < out.omega.size(); ++k) {
    double re = 0.0, im = 0.0;
    const double w = out.omega[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double a = weight[i] * dev[i];
      re += a * std::cos(w * times[i]);
      im += a * std::sin(w * times[i]);
    }
    out.values[k] = {re, im};
  }
  return out;
}

std::vector<Peak> find_peaks(const Spectrum& spectrum, double threshold_factor) {
  const std::size_t n = spectrum.values.size();
  std::vector<Peak> peaks;
  if (n < 3) return peaks;
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(spectrum.values[i]);
  std::vector<double> sorted = mag;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double threshold = threshold_factor * sorted[n / 2];

  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = mag[i - 1], b = mag[i], c = mag[i + 1];
    if (!(b > a && b >= c && b > threshold && b > 0.0)) continue;
    const double curvature = a - 2.0 * b + c;
    double shift = 0.0;
    if (curvature < 0.0) shift = 0.5 * (a - c) / curvature;
    const double step = spectrum.omega[i + 1] - spectrum.omega[i];
    peaks.push_back({spectrum.omega[i] + shift * step, b - 0.25 * (a - c) * shift});
  }
  return peaks;
}

double fold_position(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

namespace {

std::vector<double> uniform_edges(double lo, double hi, int bins) {
  std::vector<double> edges(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  return edges;
}

// Index of the bin holding v, or -1. The last bin is closed on the right.
int bin_index(double v, double lo, double hi, int bins) {
  if (!(v >= lo && v <= hi)) return -1;
  int i = static_cast<int>((v - lo) / (hi - lo) * bins);
  return std::min(i, bins - 1);
}

}  // namespace

double Histogram1D::integral() const {
  if (mode == HistNorm::counts) return pairwise_sum(counts);
  double total = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) total += counts[i] * (edges[i + 1] - edges[i]);
  return total;
}

double Histogram2D::integral() const {
  if (mode == HistNorm::counts) return counts.sum();
  const double cell = (x_edges[1] - x_edges[0]) * (p_edges[1] - p_edges[0]);
  return counts.sum() * cell;
}

Histogram1D histogram1d(std::span<const double> samples, int bins, HistNorm mode,
                        std::optional<std::pair<double, double>> range) {
  if (bins < 2) throw InvalidParameter("histogram1d: need at least two bins");
  double lo = 0.0, hi = 1.0;
  if (range) {
    std::tie(lo, hi) = *range;
    if (!(hi > lo)) throw InvalidParameter("histogram1d: empty range");
  } else if (!samples.empty()) {
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    lo = *mn;
    hi = *mx;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  Histogram1D h;
  h.edges = uniform_edges(lo, hi, bins);
  h.counts.assign(static_cast<std::size_t>(bins), 0.0);
  h.mode = mode;
  std::size_t counted = 0;
  for (double v : samples) {
    const int i = bin_index(v, lo, hi, bins);
    if (i < 0) continue;
    h.counts[static_cast<std::size_t>(i)] += 1.0;
    ++counted;
  }
  if (mode == HistNorm::density && counted > 0) {
    const double width = (hi - lo) / bins;
    for (double& c : h.counts) c /= static_cast<double>(counted) * width;
  }
  return h;
}

Histogram2D histogram2d(std::span<const double> x, std::span<const double> p, int x_bins,
                        int p_bins, HistNorm mode,
                        std::optional<std::pair<double, double>> p_range) {
  if (x_bins < 2 || p_bins < 2) throw InvalidParameter("histogram2d: need at least two bins");
  if (x.size() != p.size()) throw ConsistencyError("histogram2d: x and p differ in length");
  double lo = -1.0, hi = 1.0;
  if (p_range) {
    std::tie(lo, hi) = *p_range;
    if (!(hi > lo)) throw InvalidParameter("histogram2d: empty momentum range");
  } else if (!p.empty()) {
    const auto [mn, mx] = std::minmax_element(p.begin(), p.end());
    lo = *mn;
    hi = *mx;
    if (hi == lo) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
  Histogram2D h;
  h.x_edges = uniform_edges(0.0, kTwoPi, x_bins);
  h.p_edges = uniform_edges(lo, hi, p_bins);
  h.counts = Eigen::MatrixXd::Zero(x_bins, p_bins);
  h.mode = mode;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const int ix = std::min(static_cast<int>(fold_position(x[i]) / kTwoPi * x_bins), x_bins - 1);
    const int ip = bin_index(p[i], lo, hi, p_bins);
    if (ip < 0) continue;
    h.counts(ix, ip) += 1.0;
    ++counted;
  }
  if (mode == HistNorm::density && counted > 0) {
    const double cell = (kTwoPi / x_bins) * ((hi - lo) / p_bins);
    h.counts /= static_cast<double>(counted) * cell;
  }
  return h;
}

}  // namespace synccool

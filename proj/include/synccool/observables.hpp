#pragma once

#include <complex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace synccool {

/// Sampled observables on a common time grid.
///
/// Channels keep insertion order so CSV column order is stable. Channels whose
/// name ends in "_stderr" must be nonnegative.
struct TimeSeries {
  std::vector<double> times;
  std::vector<std::pair<std::string, std::vector<double>>> channels;
  std::vector<std::pair<std::string, std::string>> meta;

  void add_channel(std::string name, std::vector<double> values);
  bool has(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;
  std::vector<double>& channel(const std::string& name);
  /// Throws ConsistencyError on a length mismatch or a negative stderr.
  void validate() const;
};

/// Sum in pairwise order; result independent of how the caller was scheduled.
double pairwise_sum(std::span<const double> values);
double pairwise_mean(std::span<const double> values);

class UndefinedKurtosis : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Moments {
  double p2 = 0.0;
  double p4 = 0.0;
  double kurtosis = 0.0;
  double p2_stderr = 0.0;
  double p4_stderr = 0.0;
  double kurtosis_stderr = 0.0;
};

/// Pooled second and fourth moments and kurtosis <p^4>/<p^2>^2.
///
/// Samples are grouped in consecutive blocks of `group_size` (one block per
/// trajectory); standard errors are delete-one-block jackknife estimates.
/// Throws UndefinedKurtosis when every sample is zero.
Moments moments(std::span<const double> samples, std::size_t group_size = 1);

/// Same estimator from per-group means <p^2>_g and <p^4>_g of equally sized
/// groups (e.g. one entry per trajectory).
Moments moments_from_group_means(std::span<const double> group_p2,
                                 std::span<const double> group_p4);

struct MeanError {
  double mean = 0.0;
  double error = 0.0;
};

/// Mean and standard error of the mean (0 for a single value).
MeanError mean_and_stderr(std::span<const double> values);

struct Spectrum {
  std::vector<double> omega;
  std::vector<std::complex<double>> values;
  double stationary_value = 0.0;
};

std::vector<double> frequency_grid(double lo = -20.0, double hi = 20.0, std::size_t n = 2048);

/// S(i omega) = sum_n w_n exp(i omega t_n) (f(t_n) - f_st) with trapezoid
/// weights w_n, where f_st is the mean of the samples in the final
/// `window_fraction` of the time span. Non-uniform grids are allowed.
Spectrum laplace_spectrum(std::span<const double> times, std::span<const double> values,
                          double window_fraction = 0.2,
                          std::span<const double> omega = {});

struct Peak {
  double omega;
  double magnitude;
};

/// Local maxima of |S| exceeding `threshold_factor` times the median of |S|,
/// refined by a parabola through the three neighbouring samples.
std::vector<Peak> find_peaks(const Spectrum& spectrum, double threshold_factor = 3.0);

enum class HistNorm { counts, density };

struct Histogram1D {
  std::vector<double> edges;
  std::vector<double> counts;
  HistNorm mode = HistNorm::counts;

  double integral() const;
};

struct Histogram2D {
  std::vector<double> x_edges;
  std::vector<double> p_edges;
  Eigen::MatrixXd counts;  // rows: x bins, cols: p bins
  HistNorm mode = HistNorm::counts;

  double integral() const;
};

/// Without an explicit range the data range is used (right edge inclusive),
/// so every sample is counted. Samples outside an explicit range are dropped.
Histogram1D histogram1d(std::span<const double> samples, int bins,
                        HistNorm mode = HistNorm::counts,
                        std::optional<std::pair<double, double>> range = std::nullopt);

/// Positions are folded into one wavelength [0, 2 pi).
Histogram2D histogram2d(std::span<const double> x, std::span<const double> p, int x_bins,
                        int p_bins, HistNorm mode = HistNorm::counts,
                        std::optional<std::pair<double, double>> p_range = std::nullopt);

/// x mod 2 pi in [0, 2 pi).
double fold_position(double x);

}  // namespace synccool

#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace iarc {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

inline bool is_missing(double v) { return std::isnan(v); }

/// Copy of the non-missing values.
std::vector<double> drop_missing(std::span<const double> values);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_std(std::span<const double> values);

/// Linear interpolation between order statistics ("type 7"):
/// h = (n - 1) q, result = x[floor h] + (h - floor h) (x[floor h + 1] - x[floor h]).
/// `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

/// Silverman's rule of thumb, 0.9 min(sigma, IQR / 1.34) n^(-1/5). Falls back to
/// sigma when the IQR is zero and floors the result at 1e-6 max(1, |mean|).
double silverman_bandwidth(std::span<const double> values);

/// Floor applied to scales of zero-variance features.
double scale_floor(double mean_value);

/// One-dimensional Gaussian kernel density estimate.
class GaussianKde {
 public:
  GaussianKde() = default;
  /// `samples` must be non-empty and free of missing values; `bandwidth` > 0.
  GaussianKde(std::vector<double> samples, double bandwidth);
  /// Bandwidth chosen by silverman_bandwidth.
  static GaussianKde fit(std::vector<double> samples);

  double log_density(double x) const;
  double density(double x) const { return std::exp(log_density(x)); }

  double bandwidth() const noexcept { return bandwidth_; }
  const std::vector<double>& samples() const noexcept { return samples_; }
  double min() const { return samples_.front(); }
  double max() const { return samples_.back(); }

 private:
  std::vector<double> samples_;  // ascending
  double bandwidth_ = 1.0;
  double log_norm_ = 0.0;        // log(n h sqrt(2 pi))
};

/// Trapezoid rule over a uniform grid.
double trapezoid(std::span<const double> grid, std::span<const double> values);

}  // namespace iarc

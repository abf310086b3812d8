#include "iarc/stats.hpp"

#include <algorithm>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace iarc {

std::vector<double> drop_missing(std::span<const double> values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) {
    if (!is_missing(v)) out.push_back(v);
  }
  return out;
}

double mean(std::span<const double> values) {
  if (values.empty()) return kMissing;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double sample_std(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
  const double h = static_cast<double>(sorted.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double scale_floor(double mean_value) { return 1e-6 * std::max(1.0, std::abs(mean_value)); }

double silverman_bandwidth(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double sigma = sample_std(sorted);
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sigma, iqr / 1.34);
  if (spread <= 0.0) spread = sigma;
  const double n = static_cast<double>(sorted.size());
  const double h = 0.9 * spread * std::pow(n, -0.2);
  return std::max(h, scale_floor(mean(sorted)));
}

GaussianKde::GaussianKde(std::vector<double> samples, double bandwidth)
    : samples_(std::move(samples)), bandwidth_(bandwidth) {
  if (samples_.empty()) throw std::invalid_argument("KDE needs at least one sample");
  if (!(bandwidth_ > 0.0)) throw std::invalid_argument("KDE bandwidth must be positive");
  std::sort(samples_.begin(), samples_.end());
  log_norm_ = std::log(static_cast<double>(samples_.size()) * bandwidth_ *
                       std::sqrt(2.0 * std::numbers::pi));
}

GaussianKde GaussianKde::fit(std::vector<double> samples) {
  const double h = silverman_bandwidth(samples);
  return GaussianKde(std::move(samples), h);
}

double GaussianKde::log_density(double x) const {
  // Log-sum-exp anchored at the nearest sample. Kernel terms more than 750
  // nats below the anchor underflow to zero, so only a window is summed.
  auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
  double nearest_gap = std::numeric_limits<double>::infinity();
  if (it != samples_.end()) nearest_gap = *it - x;
  if (it != samples_.begin()) nearest_gap = std::min(nearest_gap, x - *std::prev(it));
  const double z_near = nearest_gap / bandwidth_;
  const double anchor = -0.5 * z_near * z_near;
  const double radius = bandwidth_ * std::sqrt(1500.0 + z_near * z_near);

  const auto first = std::lower_bound(samples_.begin(), samples_.end(), x - radius);
  const auto last = std::upper_bound(samples_.begin(), samples_.end(), x + radius);
  double acc = 0.0;
  for (auto s = first; s != last; ++s) {
    const double z = (x - *s) / bandwidth_;
    acc += std::exp(-0.5 * z * z - anchor);
  }
  return anchor + std::log(acc) - log_norm_;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return total;
}

}  // namespace iarc

#pragma once

// Synthetic inputs shared by the unit and acceptance suites.

#include <cmath>
#include <vector>

#include "iarc/metrics.hpp"
#include "iarc/rng.hpp"

namespace fixture {

// Labels drawn from softmax(z) so the logits z are calibrated; the stored
// logits are z * scale.
inline iarc::PredictionSet calibrated_logits(std::size_t n, std::size_t classes, double spread,
                                             double scale, std::uint64_t seed) {
  iarc::Rng rng(seed);
  iarc::PredictionSet p;
  p.task = iarc::Task::classification;
  p.model_version = "m";
  p.slice_name = "s";
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> z(classes);
    for (auto& v : z) v = rng.normal(0.0, spread);
    const auto prob = iarc::softmax(z);
    double u = rng.uniform(), acc = 0.0;
    int label = static_cast<int>(classes) - 1;
    for (std::size_t k = 0; k < classes; ++k) {
      acc += prob[k];
      if (u < acc) {
        label = static_cast<int>(k);
        break;
      }
    }
    for (auto& v : z) v *= scale;
    p.labels.push_back(label);
    p.probabilities.push_back(iarc::softmax(z));
    p.logits.push_back(z);
  }
  return p;
}

// y ~ N(0, 1) with a fixed, too-narrow initial interval at the given level
// pair and median 0.
inline iarc::PredictionSet gaussian_intervals(std::size_t n, double lo, double hi,
                                              double half_width, std::uint64_t seed) {
  iarc::Rng rng(seed);
  iarc::PredictionSet p;
  p.model_version = "m";
  p.slice_name = "s";
  p.levels = {lo, 0.5, hi};
  p.quantiles.assign(3, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    p.y_true.push_back(rng.normal());
    p.y_point.push_back(0.0);
    p.quantiles[0][i] = -half_width;
    p.quantiles[1][i] = 0.0;
    p.quantiles[2][i] = half_width;
  }
  return p;
}

}  // namespace fixture

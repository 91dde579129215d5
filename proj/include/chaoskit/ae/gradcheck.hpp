#pragma once

#include "autoencoder.hpp"

#include <algorithm>
#include <cmath>

namespace chaoskit::ae {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
  std::size_t worst_layer = 0;
  bool worst_is_bias = false;
};

inline double relative_error(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

/// Compares backward() against central differences of loss_mse in inference
/// mode (no latent noise) for every weight and bias.
inline GradCheckResult gradient_check(MlpAutoencoder m, const Matrix& x, const Matrix& target, double h = 1e-5) {
  const auto g = backward(m, forward(m, x, false), target);
  GradCheckResult res;
  auto probe = [&](double& p, double analytic, std::size_t layer, bool bias) {
    const double saved = p;
    p = saved + h;
    const double up = loss_mse(reconstruct(m, x), target);
    p = saved - h;
    const double down = loss_mse(reconstruct(m, x), target);
    p = saved;
    const double err = relative_error(analytic, (up - down) / (2.0 * h));
    if (err > res.max_relative_error || res.parameters == 0) {
      res.max_relative_error = std::max(res.max_relative_error, err);
      res.worst_layer = layer;
      res.worst_is_bias = bias;
    }
    ++res.parameters;
  };
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    auto& l = m.layers[i];
    for (Eigen::Index k = 0; k < l.weights.size(); ++k) probe(l.weights.data()[k], g.weights[i].data()[k], i, false);
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) probe(l.bias.data()[k], g.bias[i].data()[k], i, true);
  }
  return res;
}

}  // namespace chaoskit::ae

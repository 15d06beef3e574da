#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "sentinel/core/random.hpp"
#include "sentinel/models/ova.hpp"

namespace sentinel::models {

enum class Loss { hinge, logistic };

inline const char* to_string(Loss l) { return l == Loss::hinge ? "hinge" : "logistic"; }

struct SgdParams {
  Loss loss = Loss::hinge;
  double eta0 = 0.01;
  double l2 = 1e-4;
  std::size_t epochs = 50;
  std::uint64_t seed = 42;
  bool operator==(const SgdParams&) const = default;
};

struct Hyperplane {
  std::vector<double> weights;
  double bias = 0.0;

  double decision_value(std::span<const double> x) const {
    double f = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) f += weights[j] * x[j];
    return f;
  }
  bool operator==(const Hyperplane&) const = default;
};

inline double loss_value(Loss loss, double margin) {
  if (loss == Loss::hinge) return std::max(0.0, 1.0 - margin);
  // log(1 + exp(-m)) without overflow
  return margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
}

/// lambda/2 ||w||^2 + mean loss over the data.
inline double sgd_objective(const Hyperplane& h, const LabeledMatrix& data, std::span<const int> signs, Loss loss,
                            double l2) {
  double reg = 0.0;
  for (double w : h.weights) reg += w * w;
  double sum = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) sum += loss_value(loss, signs[i] * h.decision_value(data.row(i)));
  return 0.5 * l2 * reg + sum / static_cast<double>(data.rows());
}

struct BinarySgdFit {
  Hyperplane plane;
  std::vector<double> objective;  // regularized objective after each epoch
};

/// Plain SGD on one binary problem with signs in {-1, +1}. The sample order
/// is reshuffled every epoch; step size eta_t = eta0 / (1 + l2 * eta0 * t)
/// with t counting individual updates.
inline BinarySgdFit fit_binary_sgd(const LabeledMatrix& data, std::span<const int> signs, const SgdParams& p) {
  if (signs.size() != data.rows()) throw ValidationError("sign vector length does not match rows");
  BinarySgdFit fit;
  fit.plane.weights.assign(data.dims(), 0.0);
  auto& w = fit.plane.weights;
  double& b = fit.plane.bias;
  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(p.seed);
  std::uint64_t t = 0;
  for (std::size_t epoch = 0; epoch < p.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (auto i : order) {
      const double eta = p.eta0 / (1.0 + p.l2 * p.eta0 * static_cast<double>(t++));
      const auto x = data.row(i);
      const double y = signs[i];
      const double margin = y * fit.plane.decision_value(x);
      // d loss / d f
      double g = 0.0;
      if (p.loss == Loss::hinge) {
        g = margin < 1.0 ? -y : 0.0;
      } else {
        g = -y / (1.0 + std::exp(margin));
      }
      const double shrink = 1.0 - eta * p.l2;
      for (std::size_t j = 0; j < w.size(); ++j) w[j] = shrink * w[j] - eta * g * x[j];
      b -= eta * g;
    }
    bool finite = std::isfinite(b);
    for (double v : w) finite = finite && std::isfinite(v);
    if (!finite) throw DivergenceError(epoch + 1);
    fit.objective.push_back(sgd_objective(fit.plane, data, signs, p.loss, p.l2));
  }
  return fit;
}

/// Linear classifier trained by SGD; multi-class via one-vs-all.
struct LinearSgdModel {
  ModelInfo info;
  SgdParams params;
  std::vector<Hyperplane> planes;  // one for binary problems, K otherwise

  std::vector<double> confidences(std::span<const double> x) const {
    check_dims(info, x);
    return ova_confidences(planes, x);
  }
  int predict(std::span<const double> x) const {
    check_dims(info, x);
    return ova_predict(planes, x);
  }
  /// Signed distance-like score of the positive class (binary) or of the
  /// predicted class (multi-class).
  double decision_value(std::span<const double> x) const {
    const auto c = confidences(x);
    return planes.size() == 1 ? c[1] : c[static_cast<std::size_t>(argmax_lowest(std::span<const double>(c)))];
  }
  bool operator==(const LinearSgdModel&) const = default;
};

inline LinearSgdModel fit_sgd(const LabeledMatrix& data, const SgdParams& params = {}) {
  if (params.eta0 <= 0.0 || params.l2 < 0.0) throw ValidationError("eta0 must be positive and l2 non-negative");
  LinearSgdModel model{ModelInfo::of(data), params, {}};
  model.planes = ova_fit(data, [&](const LabeledMatrix& m, const std::vector<int>& signs) {
    return fit_binary_sgd(m, signs, params).plane;
  });
  return model;
}

}  // namespace sentinel::models

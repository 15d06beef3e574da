#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <list>
#include <numeric>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "sentinel/core/random.hpp"
#include "sentinel/models/labeled_matrix.hpp"

namespace sentinel::models {

enum class KernelKind { linear, rbf };

inline const char* to_string(KernelKind k) { return k == KernelKind::linear ? "linear" : "rbf"; }

struct Kernel {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    if (kind == KernelKind::linear) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
      return s;
    }
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double diff = a[j] - b[j];
      s += diff * diff;
    }
    return std::exp(-gamma * s);
  }
  bool operator==(const Kernel&) const = default;
};

struct SvmParams {
  double C = 1.0;
  KernelKind kernel = KernelKind::rbf;
  std::optional<double> gamma;  // rbf only; default 1 / (d * Var(X))
  double tolerance = 1e-3;
  std::optional<std::size_t> max_iterations;  // pair updates; default max(10 n, 100000)
  std::uint64_t seed = 42;
  std::size_t cache_mb = 256;
};

/// 1 / (d * Var(X)) with the variance taken over every entry of X; 1 when
/// X is constant.
inline double default_gamma(const LabeledMatrix& data) {
  const auto& x = data.features();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  return var > 0.0 ? 1.0 / (static_cast<double>(data.dims()) * var) : 1.0;
}

/// Binary kernel SVM: f(x) = sum_i coef_i K(sv_i, x) + bias with
/// coef_i = alpha_i y_i. Class 1 iff f(x) > 0.
struct SvmModel {
  ModelInfo info;
  Kernel kernel;
  double C = 1.0;
  double tolerance = 1e-3;
  std::uint64_t seed = 42;
  std::vector<double> support_vectors;  // row-major, dims() columns
  std::vector<double> coef;
  double bias = 0.0;
  bool converged = false;
  std::size_t iterations = 0;

  std::size_t support_count() const { return coef.size(); }
  std::span<const double> support_vector(std::size_t i) const {
    return {support_vectors.data() + i * info.dims(), info.dims()};
  }

  double decision_value(std::span<const double> x) const {
    check_dims(info, x);
    double f = bias;
    for (std::size_t i = 0; i < coef.size(); ++i) f += coef[i] * kernel(support_vector(i), x);
    return f;
  }
  int predict(std::span<const double> x) const { return decision_value(x) > 0.0 ? 1 : 0; }
  bool operator==(const SvmModel&) const = default;
};

/// Full solver output: the model plus the dual variables of every training
/// row in the original order.
struct SvmFit {
  SvmModel model;
  std::vector<double> alpha;
  std::vector<int> signs;
};

namespace detail {

/// LRU cache of rows of Q_ij = y_i y_j K(x_i, x_j).
class KernelRows {
 public:
  KernelRows(const LabeledMatrix& data, const std::vector<int>& y, const std::vector<std::size_t>& order, Kernel k,
             std::size_t cache_mb)
      : data_(data), y_(y), order_(order), kernel_(k) {
    const std::size_t n = order.size();
    capacity_ = std::max<std::size_t>(2, (cache_mb << 20) / std::max<std::size_t>(1, n * sizeof(double)));
    diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) diag_[i] = kernel_(xrow(i), xrow(i));
  }

  std::span<const double> xrow(std::size_t i) const { return data_.row(order_[i]); }
  double diag(std::size_t i) const { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    if (auto it = index_.find(i); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    if (lru_.size() >= capacity_) {
      index_.erase(lru_.back().first);
      lru_.pop_back();
    }
    const std::size_t n = order_.size();
    std::vector<double> q(n);
    const auto xi = xrow(i);
    for (std::size_t j = 0; j < n; ++j) q[j] = static_cast<double>(y_[i] * y_[j]) * kernel_(xi, xrow(j));
    lru_.emplace_front(i, std::move(q));
    index_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const LabeledMatrix& data_;
  const std::vector<int>& y_;
  const std::vector<std::size_t>& order_;
  Kernel kernel_;
  std::vector<double> diag_;
  std::size_t capacity_;
  std::list<std::pair<std::size_t, std::vector<double>>> lru_;
  std::unordered_map<std::size_t, std::list<std::pair<std::size_t, std::vector<double>>>::iterator> index_;
};

}  // namespace detail

/// Trains a C-SVC with sequential minimal optimization: each step picks the
/// maximal-violating pair using second-order information and solves the
/// two-variable subproblem analytically. Stops once the KKT gap
///   max_{I_up} -y_i G_i  -  min_{I_low} -y_i G_i
/// falls below `tolerance`, which bounds every per-sample KKT violation of
/// y_i f(x_i) by the same amount.
inline SvmFit fit_svc_detailed(const LabeledMatrix& data, const SvmParams& p = {}) {
  if (data.classes() > 2) throw ValidationError("SVC is binary; labels must be 0 and 1");
  if (!(p.C > 0.0)) throw ValidationError("C must be positive");
  if (!(p.tolerance > 0.0)) throw ValidationError("tolerance must be positive");
  Kernel kernel{p.kernel, 1.0};
  if (p.kernel == KernelKind::rbf) {
    kernel.gamma = p.gamma.value_or(default_gamma(data));
    if (!(kernel.gamma > 0.0) || !std::isfinite(kernel.gamma))
      throw ValidationError("rbf gamma must be positive");
  }

  const std::size_t n = data.rows();
  const double C = p.C;
  constexpr double kTau = 1e-12;

  // Solve in a seeded permutation of the rows; only tie-breaking depends on it.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(p.seed);
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.label(order[i]) == 1 ? 1 : -1;

  detail::KernelRows Q(data, y, order, kernel, p.cache_mb);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);
  auto upper = [&](std::size_t i) { return alpha[i] >= C; };
  auto lower = [&](std::size_t i) { return alpha[i] <= 0.0; };
  auto in_up = [&](std::size_t i) { return y[i] > 0 ? !upper(i) : !lower(i); };
  auto in_low = [&](std::size_t i) { return y[i] > 0 ? !lower(i) : !upper(i); };

  const std::size_t max_iter = p.max_iterations.value_or(std::max<std::size_t>(10 * n, 100000));
  std::size_t iter = 0;
  bool converged = false;
  while (true) {
    // working set selection
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i_sel = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_up(t)) continue;
      const double v = -y[t] * grad[t];
      if (v > gmax) {
        gmax = v;
        i_sel = static_cast<std::ptrdiff_t>(t);
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t j_sel = -1;
    double best_obj = std::numeric_limits<double>::infinity();
    if (i_sel >= 0) {
      const auto i = static_cast<std::size_t>(i_sel);
      const auto& qi = Q.row(i);
      for (std::size_t t = 0; t < n; ++t) {
        if (!in_low(t)) continue;
        const double v = y[t] * grad[t];
        gmax2 = std::max(gmax2, v);
        const double diff = gmax + v;
        if (diff > 0.0) {
          double quad = Q.diag(i) + Q.diag(t) - 2.0 * y[i] * y[t] * qi[t];
          if (quad <= 0.0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj < best_obj) {
            best_obj = obj;
            j_sel = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    if (gmax + gmax2 < p.tolerance || j_sel < 0) {
      converged = true;
      break;
    }
    if (iter >= max_iter) break;
    ++iter;

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const auto& qi = Q.row(i);
    const auto& qj = Q.row(j);
    const double ai_old = alpha[i], aj_old = alpha[j];
    double& ai = alpha[i];
    double& aj = alpha[j];
    if (y[i] != y[j]) {
      double quad = Q.diag(i) + Q.diag(j) + 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = -diff; }
      }
      if (diff > 0.0) {
        if (ai > C) { ai = C; aj = C - diff; }
      } else {
        if (aj > C) { aj = C; ai = C + diff; }
      }
    } else {
      double quad = Q.diag(i) + Q.diag(j) - 2.0 * qi[j];
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) { ai = C; aj = sum - C; }
      } else {
        if (aj < 0.0) { aj = 0.0; ai = sum; }
      }
      if (sum > C) {
        if (aj > C) { aj = C; ai = sum - C; }
      } else {
        if (ai < 0.0) { ai = 0.0; aj = sum; }
      }
    }
    const double di = ai - ai_old, dj = aj - aj_old;
    for (std::size_t t = 0; t < n; ++t) grad[t] += qi[t] * di + qj[t] * dj;
  }

  // offset from free vectors, or the midpoint of the feasible interval
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  double rho = free_count ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2.0;
  if (!std::isfinite(rho)) rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);

  SvmFit out;
  out.alpha.assign(n, 0.0);
  out.signs.assign(n, 0);
  SvmModel& m = out.model;
  m.info = ModelInfo::of(data);
  m.kernel = kernel;
  m.C = C;
  m.tolerance = p.tolerance;
  m.seed = p.seed;
  m.bias = -rho;
  m.converged = converged;
  m.iterations = iter;
  // store support vectors in original row order
  std::vector<std::size_t> position(n);
  for (std::size_t t = 0; t < n; ++t) position[order[t]] = t;
  for (std::size_t r = 0; r < n; ++r) {
    const auto t = position[r];
    out.alpha[r] = alpha[t];
    out.signs[r] = y[t];
    if (alpha[t] > 0.0) {
      const auto x = data.row(r);
      m.support_vectors.insert(m.support_vectors.end(), x.begin(), x.end());
      m.coef.push_back(alpha[t] * y[t]);
    }
  }
  return out;
}

inline SvmModel fit_svc(const LabeledMatrix& data, const SvmParams& p = {}) { return fit_svc_detailed(data, p).model; }

}  // namespace sentinel::models

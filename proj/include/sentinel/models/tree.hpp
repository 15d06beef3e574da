#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "sentinel/core/random.hpp"
#include "sentinel/models/gini.hpp"
#include "sentinel/models/labeled_matrix.hpp"

namespace sentinel::models {

struct TreeParams {
  std::optional<std::size_t> max_depth;  // unbounded when empty
  std::size_t min_samples_split = 2;
  bool operator==(const TreeParams&) const = default;
};

/// Internal nodes route x[feature] <= threshold to `left`. Leaves carry the
/// per-class training counts and the majority class (lowest id on ties).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  int label = 0;
  std::vector<std::size_t> counts;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

struct TreeModel {
  ModelInfo info;
  TreeParams params;
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& leaf_for(std::span<const double> x) const {
    check_dims(info, x);
    std::size_t at = 0;
    while (!nodes[at].is_leaf()) {
      const auto& n = nodes[at];
      at = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[at];
  }

  int predict(std::span<const double> x) const { return leaf_for(x).label; }

  std::size_t depth() const {
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
    std::size_t best = 0;
    while (!stack.empty()) {
      auto [i, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[i].is_leaf()) {
        stack.push_back({static_cast<std::size_t>(nodes[i].left), d + 1});
        stack.push_back({static_cast<std::size_t>(nodes[i].right), d + 1});
      }
    }
    return best;
  }

  bool operator==(const TreeModel&) const = default;
};

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

/// Smallest decrease treated as an actual improvement.
inline constexpr double kMinImpurityDecrease = 1e-12;

/// Best Gini split of `rows` over `candidate_features`. Thresholds are the
/// midpoints of consecutive distinct sorted values. Ties keep the earliest
/// (feature, threshold) in scan order: features as given, thresholds
/// ascending.
inline std::optional<Split> best_split(const LabeledMatrix& data, std::span<const std::size_t> rows,
                                       std::span<const std::size_t> candidate_features) {
  const std::size_t n = rows.size();
  if (n < 2) return std::nullopt;
  const auto k = static_cast<std::size_t>(data.classes());
  std::vector<std::size_t> total(k, 0);
  for (auto r : rows) ++total[static_cast<std::size_t>(data.label(r))];
  const double parent = gini_from_counts(total, n);
  if (parent <= 0.0) return std::nullopt;

  const double nd = static_cast<double>(n);
  std::optional<Split> best;
  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::vector<std::size_t> left(k);
  for (auto f : candidate_features) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = data.at(a, f), vb = data.at(b, f);
      return va < vb || (va == vb && a < b);
    });
    std::fill(left.begin(), left.end(), 0);
    double left_sq = 0.0;
    double right_sq = 0.0;
    for (auto c : total) right_sq += static_cast<double>(c) * static_cast<double>(c);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto cls = static_cast<std::size_t>(data.label(order[i]));
      // moving one sample of class cls from right to left
      const double lc = static_cast<double>(left[cls]);
      const double rc = static_cast<double>(total[cls] - left[cls]);
      left_sq += 2.0 * lc + 1.0;
      right_sq -= 2.0 * rc - 1.0;
      ++left[cls];
      const double v = data.at(order[i], f);
      const double next = data.at(order[i + 1], f);
      if (!(v < next)) continue;
      const double nl = static_cast<double>(i + 1);
      const double nr = nd - nl;
      const double child = ((nl - left_sq / nl) + (nr - right_sq / nr)) / nd;
      const double decrease = parent - child;
      if (decrease > kMinImpurityDecrease && (!best || decrease > best->impurity_decrease)) {
        double mid = v + (next - v) / 2.0;
        if (!(mid < next)) mid = v;
        best = Split{f, mid, decrease};
      }
    }
  }
  return best;
}

inline std::optional<Split> best_split(const LabeledMatrix& data, std::span<const std::size_t> candidate_features) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return best_split(data, rows, candidate_features);
}

namespace detail {

inline TreeNode make_leaf(const LabeledMatrix& data, std::span<const std::size_t> rows) {
  TreeNode leaf;
  leaf.counts.assign(static_cast<std::size_t>(data.classes()), 0);
  for (auto r : rows) ++leaf.counts[static_cast<std::size_t>(data.label(r))];
  leaf.label = argmax_lowest(std::span<const std::size_t>(leaf.counts));
  return leaf;
}

/// Greedy growth over `rows`. When `rng` is set and features_per_split < d,
/// each node draws a fresh feature subset.
inline std::vector<TreeNode> grow(const LabeledMatrix& data, std::vector<std::size_t> rows, const TreeParams& params,
                                  std::size_t features_per_split, Rng* rng) {
  const std::size_t d = data.dims();
  std::vector<std::size_t> all(d);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<TreeNode> nodes;

  struct Pending {
    std::vector<std::size_t> rows;
    std::size_t depth;
    int parent;
    bool is_left;
  };
  std::vector<Pending> stack;
  stack.push_back({std::move(rows), 0, -1, false});
  std::vector<std::size_t> pool(d);
  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const int id = static_cast<int>(nodes.size());
    if (job.parent >= 0) (job.is_left ? nodes[static_cast<std::size_t>(job.parent)].left
                                      : nodes[static_cast<std::size_t>(job.parent)].right) = id;
    TreeNode node = make_leaf(data, job.rows);

    const bool pure = std::count_if(node.counts.begin(), node.counts.end(), [](auto c) { return c > 0; }) <= 1;
    const bool depth_capped = params.max_depth && job.depth >= *params.max_depth;
    std::optional<Split> split;
    if (!pure && !depth_capped && job.rows.size() >= std::max<std::size_t>(2, params.min_samples_split)) {
      if (rng && features_per_split < d) {
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t i = 0; i < features_per_split; ++i) {
          const auto j = i + static_cast<std::size_t>(rng->index(d - i));
          std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(features_per_split));
        std::sort(subset.begin(), subset.end());
        split = best_split(data, job.rows, subset);
      } else {
        split = best_split(data, job.rows, all);
      }
    }
    if (!split) {
      nodes.push_back(std::move(node));
      continue;
    }
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    std::vector<std::size_t> lrows, rrows;
    for (auto r : job.rows) (data.at(r, split->feature) <= split->threshold ? lrows : rrows).push_back(r);
    nodes.push_back(std::move(node));
    // right pushed first so the left subtree is numbered first
    stack.push_back({std::move(rrows), job.depth + 1, id, false});
    stack.push_back({std::move(lrows), job.depth + 1, id, true});
  }
  return nodes;
}

}  // namespace detail

/// Fits a CART-style classification tree with Gini splits.
inline TreeModel fit_tree(const LabeledMatrix& data, const TreeParams& params = {}) {
  std::vector<std::size_t> rows(data.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return TreeModel{ModelInfo::of(data), params, detail::grow(data, std::move(rows), params, data.dims(), nullptr)};
}

}  // namespace sentinel::models

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "sentinel/core/random.hpp"
#include "sentinel/models/tree.hpp"

namespace sentinel::models {

struct ForestParams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> features_per_split;  // default floor(sqrt(d)), at least 1
  std::uint64_t seed = 42;
  bool bootstrap = true;
  TreeParams tree;
  std::size_t threads = 0;  // 0: hardware concurrency; never affects the result
};

struct ForestModel {
  ModelInfo info;
  std::vector<TreeModel> trees;
  std::vector<std::uint64_t> tree_seeds;
  std::size_t features_per_split = 1;
  std::size_t sample_size = 0;
  bool bootstrap = true;
  std::uint64_t seed = 42;

  std::vector<std::size_t> votes(std::span<const double> x) const {
    check_dims(info, x);
    std::vector<std::size_t> tally(static_cast<std::size_t>(info.classes), 0);
    for (const auto& t : trees) ++tally[static_cast<std::size_t>(t.predict(x))];
    return tally;
  }

  /// Majority vote; ties go to the lowest class id.
  int predict(std::span<const double> x) const {
    const auto tally = votes(x);
    return argmax_lowest(std::span<const std::size_t>(tally));
  }

  bool operator==(const ForestModel&) const = default;
};

/// Bagged forest. Tree i uses seed mix_seed(seed, i) for both its bootstrap
/// draw and its per-node feature subsets, so the model is independent of
/// the thread count and scheduling.
inline ForestModel fit_forest(const LabeledMatrix& data, const ForestParams& params = {}) {
  if (params.n_trees == 0) throw ValidationError("n_trees must be at least 1");
  const std::size_t d = data.dims();
  std::size_t fps = params.features_per_split.value_or(
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(d))))));
  if (fps == 0 || fps > d) throw ValidationError("features_per_split must lie in [1, d]");

  ForestModel model;
  model.info = ModelInfo::of(data);
  model.features_per_split = fps;
  model.sample_size = data.rows();
  model.bootstrap = params.bootstrap;
  model.seed = params.seed;
  model.trees.resize(params.n_trees);
  model.tree_seeds.resize(params.n_trees);
  for (std::size_t i = 0; i < params.n_trees; ++i) model.tree_seeds[i] = mix_seed(params.seed, i);

  auto build = [&](std::size_t i) {
    Rng rng(model.tree_seeds[i]);
    std::vector<std::size_t> rows(data.rows());
    if (params.bootstrap) {
      for (auto& r : rows) r = static_cast<std::size_t>(rng.index(data.rows()));
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    model.trees[i] = TreeModel{model.info, params.tree, detail::grow(data, std::move(rows), params.tree, fps, &rng)};
  };

  std::size_t threads = params.threads ? params.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, params.n_trees);
  if (threads <= 1) {
    for (std::size_t i = 0; i < params.n_trees; ++i) build(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < params.n_trees; i += threads) build(i);
      });
    for (auto& th : pool) th.join();
  }
  return model;
}

}  // namespace sentinel::models

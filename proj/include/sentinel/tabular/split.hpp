#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sentinel/core/random.hpp"
#include "sentinel/tabular/table.hpp"

namespace sentinel::tabular {

struct SplitSpec {
  double train_fraction = 0.75;
  std::uint64_t seed = 42;
  std::optional<std::string> stratify_on;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Row indices for a seeded train/test partition. The training side gets
/// floor(rows * train_fraction) rows. With stratification each class gets
/// floor or ceil of its proportional share; leftover slots go to the
/// classes with the largest fractional remainder (ties: smaller class value).
inline SplitIndices split_indices(const Table& t, const SplitSpec& spec) {
  if (t.rows() < 2) throw ValidationError("split needs at least two rows");
  if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
    throw ValidationError("train_fraction must lie in (0, 1)");
  const std::size_t n = t.rows();
  const auto n_train = static_cast<std::size_t>(std::floor(static_cast<double>(n) * spec.train_fraction));

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(spec.seed);
  rng.shuffle(std::span<std::size_t>(perm));

  SplitIndices out;
  if (!spec.stratify_on) {
    out.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    return out;
  }

  const auto sc = t.find_column(*spec.stratify_on);
  if (!sc) throw NotFoundError("stratify_on column '" + *spec.stratify_on + "' not found");
  const auto& col = t.column(*sc);
  for (auto p : col.present)
    if (!p) throw ValidationError("stratify_on column '" + *spec.stratify_on + "' has missing cells");

  std::map<double, std::size_t> counts;
  for (double v : col.values) ++counts[v];
  std::map<double, std::size_t> quota;
  std::vector<std::pair<double, double>> remainders;  // (fraction, class)
  std::size_t assigned = 0;
  for (auto [cls, cnt] : counts) {
    const double exact = static_cast<double>(cnt) * spec.train_fraction;
    const auto q = static_cast<std::size_t>(std::floor(exact));
    quota[cls] = q;
    assigned += q;
    remainders.emplace_back(exact - static_cast<double>(q), cls);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < n_train && i < remainders.size(); ++i, ++assigned) ++quota[remainders[i].second];

  for (auto r : perm) {
    auto& q = quota[col.values[r]];
    if (q > 0) {
      out.train.push_back(r);
      --q;
    } else {
      out.test.push_back(r);
    }
  }
  return out;
}

inline std::pair<Table, Table> split(const Table& t, const SplitSpec& spec) {
  const auto idx = split_indices(t, spec);
  return {t.select_rows(idx.train, t.name() + ".train"), t.select_rows(idx.test, t.name() + ".test")};
}

}  // namespace sentinel::tabular

#pragma once

// Permutation feature importance: the drop in R² when one feature column is shuffled.

#include <algorithm>
#include <array>
#include <numeric>
#include <span>
#include <vector>

#include "viewscope/features.hpp"
#include "viewscope/metrics.hpp"
#include "viewscope/rng.hpp"
#include "viewscope/trees.hpp"

namespace viewscope {

struct ImportanceReport {
  double baseline_r2 = 0.0;
  std::array<double, kFeatureCount> importance{};
  std::array<std::size_t, kFeatureCount> ranking{};  // feature indices, most important first

  std::size_t rank_of(std::size_t feature) const {
    return static_cast<std::size_t>(std::find(ranking.begin(), ranking.end(), feature) - ranking.begin()) + 1;
  }
  friend bool operator==(const ImportanceReport&, const ImportanceReport&) = default;
};

inline constexpr std::size_t kMinImportanceRows = 10;

/// Importance of feature j = mean over repetitions of (baseline R² − R² with column j shuffled).
/// Repetition r of feature j shuffles with seed derive_seed(seed, j, r). Averaging the drops, not
/// the R² values, keeps the importance of an unused feature at exactly 0.
inline ImportanceReport permutation_importance(const TreeEnsemble& model, std::span<const DataRow> rows,
                                               std::size_t repetitions = 5, std::uint64_t seed = 0) {
  if (rows.size() < kMinImportanceRows) throw TooFewRows(rows.size(), kMinImportanceRows);
  repetitions = std::max<std::size_t>(1, repetitions);
  std::vector<double> truth;
  for (const auto& r : rows) truth.push_back(r.y);

  ImportanceReport rep;
  const auto base_pred = model.predict(rows);
  rep.baseline_r2 = r_squared(base_pred, truth);

  std::vector<DataRow> shuffled(rows.begin(), rows.end());
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!model.uses_feature(f)) {
      rep.importance[f] = 0.0;
      continue;
    }
    double drop = 0.0;
    for (std::size_t r = 0; r < repetitions; ++r) {
      std::vector<double> column;
      for (const auto& row : rows) column.push_back(row.x[f]);
      Rng rng(derive_seed(seed, f, r));
      rng.shuffle(std::span<double>(column));
      for (std::size_t i = 0; i < rows.size(); ++i) shuffled[i].x[f] = column[i];
      drop += rep.baseline_r2 - r_squared(model.predict(shuffled), truth);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) shuffled[i].x[f] = rows[i].x[f];
    rep.importance[f] = drop / static_cast<double>(repetitions);
  }

  std::iota(rep.ranking.begin(), rep.ranking.end(), 0);
  std::stable_sort(rep.ranking.begin(), rep.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return rep.importance[a] > rep.importance[b]; });
  return rep;
}

}  // namespace viewscope

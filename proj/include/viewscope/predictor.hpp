#pragma once

// Satisfaction-prediction pipeline: trim → aggregate → split → train a small grid of forest and
// boosted candidates per label → keep the best by validation R².

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viewscope/dataset.hpp"
#include "viewscope/features.hpp"
#include "viewscope/metrics.hpp"
#include "viewscope/parallel.hpp"
#include "viewscope/rng.hpp"
#include "viewscope/trees.hpp"

namespace viewscope {

class ModelMissing : public std::runtime_error {
 public:
  explicit ModelMissing(Label l) : std::runtime_error("no model for label '" + std::string(to_string(l)) + "'") {}
};

struct TrainConfig {
  std::uint64_t seed = 42;
  TrimOptions trim;
  EnsembleParams forest = default_forest_params();
  EnsembleParams boosted = default_boosted_params();
  std::vector<int> forest_depths{8, 12, 16};
  std::vector<int> boosted_depths{3, 4, 6};
  std::size_t pfi_repetitions = 5;
};

struct Candidate {
  TreeEnsemble model;
  std::optional<double> validation_r2;  // absent when the validation labels are constant
  double validation_mae = 0.0;
  double validation_rmse = 0.0;
};

inline Candidate score_candidate(TreeEnsemble model, std::span<const DataRow> validation) {
  Candidate c{std::move(model), std::nullopt, 0.0, 0.0};
  if (validation.empty()) return c;
  std::vector<double> truth;
  for (const auto& r : validation) truth.push_back(r.y);
  const auto pred = c.model.predict(validation);
  c.validation_mae = mean_absolute_error(pred, truth);
  c.validation_rmse = root_mean_square_error(pred, truth);
  if (truth.size() >= 2) {
    try {
      c.validation_r2 = r_squared(pred, truth);
    } catch (const ZeroVariance&) {
    }
  }
  return c;
}

/// Index of the best candidate: highest validation R² (lowest RMSE when R² is undefined for all),
/// ties toward random_forest, then fewer trees, then earlier position.
inline std::size_t select_model(std::span<const Candidate> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_model: no candidates");
  const bool any_r2 = std::any_of(candidates.begin(), candidates.end(), [](const Candidate& c) { return c.validation_r2.has_value(); });
  auto score = [&](const Candidate& c) {
    if (any_r2) return c.validation_r2.value_or(-std::numeric_limits<double>::infinity());
    return -c.validation_rmse;
  };
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto& a = candidates[i];
    const auto& b = candidates[best];
    const double sa = score(a), sb = score(b);
    if (sa > sb) {
      best = i;
    } else if (sa == sb) {
      const bool a_rf = a.model.family == Family::RandomForest, b_rf = b.model.family == Family::RandomForest;
      if (a_rf != b_rf) {
        if (a_rf) best = i;
      } else if (a.model.trees.size() < b.model.trees.size()) {
        best = i;
      }
    }
  }
  return best;
}

struct CandidateSpec {
  Family family;
  EnsembleParams params;
};

inline std::vector<CandidateSpec> candidate_grid(const TrainConfig& cfg) {
  std::vector<CandidateSpec> out;
  for (int d : cfg.forest_depths) {
    auto p = cfg.forest;
    p.max_depth = d;
    out.push_back({Family::RandomForest, p});
  }
  for (int d : cfg.boosted_depths) {
    auto p = cfg.boosted;
    p.max_depth = d;
    out.push_back({Family::GradientBoosted, p});
  }
  return out;
}

struct LabelTraining {
  Label label = Label::Overall;
  std::size_t train_rows = 0;
  std::size_t validation_rows = 0;
  std::vector<Candidate> candidates;
  std::size_t selected = 0;

  const Candidate& best() const { return candidates[selected]; }
};

/// Trains every grid candidate on one split. Candidate k uses seed derive_seed(seed, label, k).
inline LabelTraining train_label(const TrainingDataset& ds, const TrainConfig& cfg) {
  LabelTraining out;
  out.label = ds.label;
  out.train_rows = ds.train.size();
  out.validation_rows = ds.validation.size();
  const auto grid = candidate_grid(cfg);
  out.candidates.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(ds.label), k);
    out.candidates[k] = score_candidate(train_ensemble(grid[k].family, ds.train, grid[k].params, seed, ds.label),
                                        ds.validation);
  }
  out.selected = select_model(out.candidates);
  return out;
}

struct PipelineResult {
  TrimReport trim;
  std::size_t scenarios = 0;
  std::array<std::optional<LabelTraining>, kLabelCount> labels;
  std::array<std::optional<TrainingDataset>, kLabelCount> datasets;
};

/// Splits for each label use derive_seed(seed, 0x5370, label).
inline std::array<std::optional<TrainingDataset>, kLabelCount> prepare_datasets(
    const std::vector<ResponseRecord>& responses, const FeatureTable& features, const TrainConfig& cfg,
    TrimReport* trim_out = nullptr, std::size_t* scenarios_out = nullptr) {
  const auto trimmed = trim_responses(responses, cfg.trim);
  const auto means = aggregate_scenarios(trimmed.records);
  if (trim_out) *trim_out = trimmed.report;
  if (scenarios_out) *scenarios_out = means.size();
  std::array<std::optional<TrainingDataset>, kLabelCount> out;
  for (auto label : kLabels) {
    auto rows = build_rows(means, features, label);
    out[static_cast<std::size_t>(label)] =
        split_dataset(std::move(rows), derive_seed(cfg.seed, 0x5370u, static_cast<std::uint64_t>(label)), label);
  }
  return out;
}

inline PipelineResult run_training_pipeline(const std::vector<ResponseRecord>& responses, const FeatureTable& features,
                                            const TrainConfig& cfg) {
  PipelineResult res;
  res.datasets = prepare_datasets(responses, features, cfg, &res.trim, &res.scenarios);
  for (auto label : kLabels) {
    const auto i = static_cast<std::size_t>(label);
    res.labels[i] = train_label(*res.datasets[i], cfg);
  }
  return res;
}

// ---------------------------------------------------------------------------------------------
// Prediction

using SatisfactionScores = std::array<double, kLabelCount>;  // overall, content, access, privacy

using ModelSet = std::map<Label, TreeEnsemble>;

inline SatisfactionScores predict_scores(const ModelSet& models, const ViewFeatures& features) {
  SatisfactionScores out{};
  const auto x = features.to_vector();
  for (auto label : kLabels) {
    auto it = models.find(label);
    if (it == models.end()) throw ModelMissing(label);
    out[static_cast<std::size_t>(label)] = std::clamp(it->second.predict(x), kRatingMin, kRatingMax);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Synthetic data with a known signal

/// Plausible random feature vector: category ratios sum to one, distances present only for seen
/// categories, EN consistent with the ratios.
inline FeatureVector synthetic_features(Rng& rng) {
  ViewFeatures f;
  f.wn = 1 + static_cast<int>(rng.below(4));
  f.was = rng.uniform(1.5, 30.0);
  for (auto& z : f.zones) z = rng.uniform();
  double total = 0.0;
  for (std::size_t c = 0; c < kViewCategoryCount; ++c) {
    // building, tree, sky always candidates; the others are often absent
    const bool common = c == 0 || c == 2 || c == 7;
    const double w = (common || rng.uniform() < 0.5) ? -std::log(1.0 - rng.uniform()) : 0.0;
    f.ratios[c] = w;
    total += w;
  }
  for (auto& r : f.ratios) r /= total;
  for (std::size_t d = 0; d < kDistanceCategories.size(); ++d) {
    if (f.ratios[static_cast<std::size_t>(kDistanceCategories[d])] > 0.0) f.distances[d] = rng.uniform(3.0, 600.0);
  }
  for (double r : f.ratios)
    if (r > 0.0) ++f.en;
  f.fh = rng.uniform(3.0, 60.0);
  f.sc = static_cast<int>(rng.below(3));
  return f.to_vector();
}

/// Noiseless target driven by three features only: Sr (13), Br (6), FH (21).
inline double synthetic_signal(const FeatureVector& x) {
  return std::clamp(6.0 * x[13] - 4.0 * x[6] + 0.06 * (x[21] - 30.0), kRatingMin, kRatingMax);
}

inline constexpr std::array<std::size_t, 3> kSyntheticSignalFeatures = {6, 13, 21};

inline std::vector<DataRow> synthetic_rows(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<DataRow> rows;
  for (std::size_t i = 0; i < n; ++i) {
    DataRow r;
    r.scenario_id = std::to_string(i + 1);
    r.x = synthetic_features(rng);
    r.y = synthetic_signal(r.x);
    rows.push_back(std::move(r));
  }
  return rows;
}

/// Per-label ground truth used for the survey simulator.
inline SatisfactionScores synthetic_label_means(const FeatureVector& x) {
  auto c = [](double v) { return std::clamp(v, kRatingMin, kRatingMax); };
  return {synthetic_signal(x),
          c(7.0 * x[13] + 4.0 * x[8] - 3.0 * x[7] - 1.0),
          c(0.15 * x[1] + 3.0 * x[2] - 2.0),
          c(0.05 * x[21] - 6.0 * x[12] - 1.0)};
}

struct SyntheticSurvey {
  std::vector<ResponseRecord> responses;
  FeatureTable features;
};

/// Simulated raters: Gaussian noise around the per-label truth, 4 % wild responses, 3 % missing.
inline SyntheticSurvey synthetic_survey(std::size_t scenarios, std::size_t raters, std::uint64_t seed,
                                        double noise_sd = 0.6) {
  SyntheticSurvey s;
  Rng rng(seed);
  for (std::size_t k = 0; k < scenarios; ++k) {
    const std::string id = std::to_string(k + 1);
    const auto x = synthetic_features(rng);
    s.features.emplace(id, x);
    const auto truth = synthetic_label_means(x);
    for (std::size_t p = 0; p < raters; ++p) {
      ResponseRecord rec{id, "p" + std::to_string(rng.below(181) + 1), {}};
      for (std::size_t l = 0; l < kLabelCount; ++l) {
        const double u = rng.uniform();
        if (u < 0.03) continue;
        double v;
        if (u < 0.07) {
          v = rng.uniform(kRatingMin, kRatingMax);
        } else {
          // Box–Muller
          const double g = std::sqrt(-2.0 * std::log(1.0 - rng.uniform())) * std::cos(2.0 * 3.14159265358979323846 * rng.uniform());
          v = truth[l] + noise_sd * g;
        }
        rec.ratings[l] = std::round(std::clamp(v, kRatingMin, kRatingMax) * 100.0) / 100.0;
      }
      s.responses.push_back(std::move(rec));
    }
  }
  return s;
}

}  // namespace viewscope

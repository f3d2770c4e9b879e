#pragma once

// Case-study fixture tables and the survey / framework / predictor comparison built on them.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "viewscope/csv.hpp"
#include "viewscope/framework.hpp"
#include "viewscope/metrics.hpp"
#include "viewscope/predictor.hpp"

namespace viewscope {

enum class FixtureSet { B, C };

struct FixtureRow {
  std::string image_id;
  std::map<std::string, std::string> raw;  // cell text as shipped

  std::optional<double> get(const std::string& column) const {
    auto it = raw.find(column);
    if (it == raw.end()) return std::nullopt;
    return parse_optional_number(it->second);
  }
  double require(const std::string& column) const {
    auto v = get(column);
    if (!v) throw DatasetError("fixture image " + image_id + ": cell '" + column + "' is absent");
    return *v;
  }
};

struct FixtureTable {
  FixtureSet set = FixtureSet::B;
  std::vector<std::string> columns;
  std::vector<FixtureRow> rows;
};

inline FixtureTable parse_fixture_table(const CsvTable& t, FixtureSet set) {
  FixtureTable out{set, t.header, {}};
  const auto id = t.require_column("image_id");
  for (const auto& r : t.rows) {
    FixtureRow row{r[id], {}};
    for (std::size_t c = 0; c < t.header.size(); ++c) row.raw[t.header[c]] = r[c];
    out.rows.push_back(std::move(row));
  }
  return out;
}

inline std::filesystem::path fixture_path(const std::filesystem::path& dir, FixtureSet set) {
  return dir / (set == FixtureSet::B ? "appendix_b.csv" : "appendix_c.csv");
}

inline FixtureTable load_fixture_table(const std::filesystem::path& dir, FixtureSet set) {
  return parse_fixture_table(read_csv(fixture_path(dir, set)), set);
}

inline LayerWeights fixture_layers(const FixtureRow& r) {
  return {r.require("L_sky"),       r.require("L_landscape"), r.require("L_ground"),  r.require("L_nature"),
          r.require("wf_ct_dis"),   r.require("wf_movement"), r.require("wf_nature")};
}

/// Framework scores recomputed from the fixture's layer weights. View access is not derivable from
/// the tables (no window angles are printed), so set C takes it from its printed ±5 column.
inline FrameworkScores fixture_framework_scores(const FixtureRow& r, FixtureSet set) {
  const double content = content_score(fixture_layers(r));
  if (set == FixtureSet::C) return vqi(content, unscale_bipolar(r.require("framework_access_scaled")));
  FrameworkScores s;
  s.v_content = content;
  s.scaled_content = scale_bipolar(content);
  return s;
}

/// Feature vector assembled from the printed ray-cast cells. Variables the tables do not print
/// (window size, zones, floor height, and sky condition for set B) are encoded as -1.
inline FeatureVector fixture_feature_vector(const FixtureRow& r) {
  FeatureVector v{};
  v.fill(kAbsentDistance);
  const std::array<const char*, 8> ratio_cols = {"Br", "Er", "Tr", "Pr", "Gr", "Wr", "Dr", "Sr"};
  int en = 0;
  for (std::size_t c = 0; c < ratio_cols.size(); ++c) {
    v[6 + c] = r.get(ratio_cols[c]).value_or(0.0);
    if (v[6 + c] > 0.0) ++en;
  }
  const std::array<const char*, 6> dist_cols = {"Bd", "Ed", "Td", "Gd", "Wd", "Dd"};
  for (std::size_t d = 0; d < dist_cols.size(); ++d) v[14 + d] = r.get(dist_cols[d]).value_or(kAbsentDistance);
  v[20] = en;
  if (auto sc = r.get("SC")) v[22] = *sc;
  return v;
}

// ---------------------------------------------------------------------------------------------
// Comparison

enum class Source { Survey, Framework, Predictor };
constexpr std::string_view to_string(Source s) {
  return s == Source::Survey ? "survey" : (s == Source::Framework ? "framework" : "predictor");
}

struct PairComparison {
  Label label;
  Source a;
  Source b;
  std::vector<std::string> image_ids;
  std::vector<double> residuals;  // a − b per image
  double mae = 0.0;
  double rmse = 0.0;
};

struct ComparisonReport {
  FixtureSet set = FixtureSet::B;
  bool live_predictor = false;
  std::vector<PairComparison> pairs;

  const PairComparison* find(Label l, Source a, Source b) const {
    for (const auto& p : pairs)
      if (p.label == l && ((p.a == a && p.b == b) || (p.a == b && p.b == a))) return &p;
    return nullptr;
  }
};

/// Series of one source for one label, on the ±5 scale; nullopt cells where the table has none.
inline std::vector<std::optional<double>> fixture_series(const FixtureTable& t, Source src, Label label,
                                                         const ModelSet* models) {
  std::vector<std::optional<double>> out;
  for (const auto& r : t.rows) {
    std::optional<double> v;
    switch (src) {
      case Source::Survey:
        v = r.get("survey_" + std::string(to_string(label)));
        break;
      case Source::Framework: {
        if (t.set == FixtureSet::B && label != Label::Content) break;
        const auto s = fixture_framework_scores(r, t.set);
        // the product index stands for overall; view access for both access and privacy
        if (label == Label::Overall) v = s.scaled_vqi;
        else if (label == Label::Content) v = s.scaled_content;
        else v = s.scaled_access;
        break;
      }
      case Source::Predictor:
        if (models) {
          const auto x = fixture_feature_vector(r);
          v = predict_scores(*models, ViewFeatures::from_vector(x))[static_cast<std::size_t>(label)];
        } else {
          v = r.get("predictor_" + std::string(to_string(label)));
        }
        break;
    }
    out.push_back(v);
  }
  return out;
}

/// MAE/RMSE for every (label, source pair) with at least one image where both sources have a
/// value. Errors come from the shared metrics functions.
inline ComparisonReport compare_fixtures(const FixtureTable& t, const ModelSet* models = nullptr) {
  ComparisonReport rep;
  rep.set = t.set;
  rep.live_predictor = models != nullptr;
  const std::array<std::pair<Source, Source>, 3> combos = {
      std::pair{Source::Survey, Source::Framework}, std::pair{Source::Survey, Source::Predictor},
      std::pair{Source::Framework, Source::Predictor}};
  for (auto label : kLabels) {
    for (auto [a, b] : combos) {
      const auto sa = fixture_series(t, a, label, models);
      const auto sb = fixture_series(t, b, label, models);
      PairComparison pc{label, a, b, {}, {}, 0.0, 0.0};
      std::vector<double> va, vb;
      for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (!sa[i] || !sb[i]) continue;
        pc.image_ids.push_back(t.rows[i].image_id);
        pc.residuals.push_back(*sa[i] - *sb[i]);
        va.push_back(*sa[i]);
        vb.push_back(*sb[i]);
      }
      if (va.empty()) continue;
      pc.mae = mean_absolute_error(va, vb);
      pc.rmse = root_mean_square_error(va, vb);
      rep.pairs.push_back(std::move(pc));
    }
  }
  return rep;
}

inline nlohmann::json report_to_json(const ComparisonReport& rep) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : rep.pairs) {
    nlohmann::json residuals = nlohmann::json::array();
    for (std::size_t i = 0; i < p.residuals.size(); ++i)
      residuals.push_back({{"image_id", p.image_ids[i]}, {"residual", p.residuals[i]}});
    pairs.push_back({{"label", std::string(to_string(p.label))},
                     {"a", std::string(to_string(p.a))},
                     {"b", std::string(to_string(p.b))},
                     {"n", p.residuals.size()},
                     {"mae", p.mae},
                     {"rmse", p.rmse},
                     {"residuals", residuals}});
  }
  return {{"fixture_set", rep.set == FixtureSet::B ? "B" : "C"},
          {"predictor_source", rep.live_predictor ? "model" : "fixture"},
          {"comparisons", pairs}};
}

inline std::string report_matrix_csv(const ComparisonReport& rep) {
  std::string s = "label,a,b,n,mae,rmse\n";
  for (const auto& p : rep.pairs) {
    s += std::string(to_string(p.label)) + "," + std::string(to_string(p.a)) + "," + std::string(to_string(p.b)) + "," +
         std::to_string(p.residuals.size()) + "," + format_number(p.mae) + "," + format_number(p.rmse) + "\n";
  }
  return s;
}

inline std::string report_residuals_csv(const ComparisonReport& rep) {
  std::string s = "label,a,b,image_id,residual\n";
  for (const auto& p : rep.pairs)
    for (std::size_t i = 0; i < p.residuals.size(); ++i)
      s += std::string(to_string(p.label)) + "," + std::string(to_string(p.a)) + "," + std::string(to_string(p.b)) +
           "," + p.image_ids[i] + "," + format_number(p.residuals[i]) + "\n";
  return s;
}

}  // namespace viewscope

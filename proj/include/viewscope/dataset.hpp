#pragma once

// Survey responses → trimmed responses → per-scenario mean labels → train/validation split.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "viewscope/csv.hpp"
#include "viewscope/features.hpp"
#include "viewscope/rng.hpp"

namespace viewscope {

enum class Label : std::uint8_t { Overall, Content, Access, Privacy };
inline constexpr std::size_t kLabelCount = 4;
inline constexpr std::array<Label, kLabelCount> kLabels = {Label::Overall, Label::Content, Label::Access,
                                                           Label::Privacy};
inline constexpr std::array<std::string_view, kLabelCount> kLabelNames = {"overall", "content", "access", "privacy"};

constexpr std::string_view to_string(Label l) { return kLabelNames[static_cast<std::size_t>(l)]; }
inline std::optional<Label> label_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kLabelCount; ++i)
    if (kLabelNames[i] == s) return kLabels[i];
  return std::nullopt;
}

inline constexpr double kRatingMin = -5.0;
inline constexpr double kRatingMax = 5.0;

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewRows : public std::runtime_error {
 public:
  TooFewRows(std::size_t have, std::size_t need)
      : std::runtime_error("too few rows: " + std::to_string(have) + " (need at least " + std::to_string(need) + ")") {}
};

struct ResponseRecord {
  std::string scenario_id;
  std::string participant_id;
  std::array<std::optional<double>, kLabelCount> ratings;
  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

// ---------------------------------------------------------------------------------------------
// Trimming

/// Linear-interpolation quantile of sorted data (same as numpy's default).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::nan("");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Sample standard deviation (n − 1); 0 for fewer than two values.
inline double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

struct TrimOptions {
  double iqr_factor = 1.5;
  double max_std = 3.0;
};

struct TrimReport {
  std::size_t ratings_total = 0;  // non-missing ratings seen
  std::size_t missing = 0;
  std::size_t dropped_iqr = 0;
  std::size_t dropped_std = 0;
  std::size_t groups_dropped = 0;
  std::vector<std::string> empty_scenarios;  // scenarios left with no rating at all

  double trimmed_fraction() const {
    return ratings_total ? static_cast<double>(dropped_iqr + dropped_std) / static_cast<double>(ratings_total) : 0.0;
  }
};

struct TrimResult {
  std::vector<ResponseRecord> records;
  TrimReport report;
};

/// Indices of values that survive repeated IQR fencing (applied until nothing more is removed,
/// so that trimming an already-trimmed group is a no-op).
inline std::vector<std::size_t> iqr_keep(const std::vector<double>& values, double factor) {
  std::vector<std::size_t> keep(values.size());
  std::iota(keep.begin(), keep.end(), 0);
  while (keep.size() >= 2) {
    std::vector<double> sorted;
    for (auto k : keep) sorted.push_back(values[k]);
    std::sort(sorted.begin(), sorted.end());
    const double q1 = quantile_sorted(sorted, 0.25);
    const double q3 = quantile_sorted(sorted, 0.75);
    const double iqr = q3 - q1;
    const double lo = q1 - factor * iqr;
    const double hi = q3 + factor * iqr;
    std::vector<std::size_t> next;
    for (auto k : keep)
      if (values[k] >= lo && values[k] <= hi) next.push_back(k);
    if (next.size() == keep.size()) break;
    keep = std::move(next);
  }
  return keep;
}

/// Per scenario and label: drop missing ratings, fence outliers at Q1 − 1.5 IQR / Q3 + 1.5 IQR,
/// then drop the whole group if its remaining sample standard deviation exceeds 3.
inline TrimResult trim_responses(const std::vector<ResponseRecord>& records, const TrimOptions& opt = {}) {
  TrimResult out{records, {}};
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<std::size_t>> by_scenario;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = by_scenario.try_emplace(records[i].scenario_id);
    if (inserted) order.push_back(records[i].scenario_id);
    it->second.push_back(i);
  }

  for (const auto& sid : order) {
    const auto& idx = by_scenario[sid];
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      std::vector<std::size_t> rows;
      std::vector<double> values;
      for (auto r : idx) {
        if (records[r].ratings[l]) {
          rows.push_back(r);
          values.push_back(*records[r].ratings[l]);
        } else {
          ++out.report.missing;
        }
      }
      out.report.ratings_total += values.size();
      if (values.empty()) continue;

      const auto keep = iqr_keep(values, opt.iqr_factor);
      std::vector<bool> kept(values.size(), false);
      for (auto k : keep) kept[k] = true;
      std::vector<double> survivors;
      for (std::size_t k = 0; k < values.size(); ++k) {
        if (kept[k]) {
          survivors.push_back(values[k]);
        } else {
          out.records[rows[k]].ratings[l].reset();
          ++out.report.dropped_iqr;
        }
      }
      if (sample_std(survivors) > opt.max_std) {
        for (std::size_t k = 0; k < values.size(); ++k) {
          if (kept[k]) out.records[rows[k]].ratings[l].reset();
        }
        out.report.dropped_std += survivors.size();
        ++out.report.groups_dropped;
      }
    }
    const bool any_left = std::any_of(idx.begin(), idx.end(), [&](std::size_t r) {
      return std::any_of(out.records[r].ratings.begin(), out.records[r].ratings.end(),
                         [](const auto& v) { return v.has_value(); });
    });
    if (!any_left) out.report.empty_scenarios.push_back(sid);
  }
  return out;
}

// ---------------------------------------------------------------------------------------------
// Aggregation

struct ScenarioMeans {
  std::string scenario_id;
  std::array<std::optional<double>, kLabelCount> means;
  std::array<std::size_t, kLabelCount> counts{};
};

/// Mean rating per scenario and label, in order of first appearance. Scenarios with no remaining
/// rating in any label are left out.
inline std::vector<ScenarioMeans> aggregate_scenarios(const std::vector<ResponseRecord>& records) {
  std::vector<ScenarioMeans> out;
  std::unordered_map<std::string, std::size_t> pos;
  std::vector<std::array<double, kLabelCount>> sums;
  for (const auto& r : records) {
    auto [it, inserted] = pos.try_emplace(r.scenario_id, out.size());
    if (inserted) {
      out.push_back({r.scenario_id, {}, {}});
      sums.push_back({});
    }
    auto& m = out[it->second];
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      if (!r.ratings[l]) continue;
      sums[it->second][l] += *r.ratings[l];
      ++m.counts[l];
    }
  }
  std::vector<ScenarioMeans> kept;
  for (std::size_t s = 0; s < out.size(); ++s) {
    bool any = false;
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      if (out[s].counts[l]) {
        out[s].means[l] = sums[s][l] / static_cast<double>(out[s].counts[l]);
        any = true;
      }
    }
    if (any) kept.push_back(std::move(out[s]));
  }
  return kept;
}

// ---------------------------------------------------------------------------------------------
// Rows and split

struct DataRow {
  std::string scenario_id;
  FeatureVector x{};
  double y = 0.0;
  friend bool operator==(const DataRow&, const DataRow&) = default;
};

using FeatureTable = std::map<std::string, FeatureVector>;

/// Joins scenario means for one label with the feature table. Every scenario must have features.
inline std::vector<DataRow> build_rows(const std::vector<ScenarioMeans>& means, const FeatureTable& features,
                                       Label label) {
  std::vector<DataRow> rows;
  for (const auto& m : means) {
    auto it = features.find(m.scenario_id);
    if (it == features.end()) throw DatasetError("scenario '" + m.scenario_id + "' has no feature vector");
    const auto& v = m.means[static_cast<std::size_t>(label)];
    if (!v) continue;
    rows.push_back({m.scenario_id, it->second, *v});
  }
  return rows;
}

struct TrainingDataset {
  Label label = Label::Overall;
  std::vector<DataRow> train;
  std::vector<DataRow> validation;
};

inline constexpr std::size_t kMinSplitRows = 5;

/// Seeded shuffle, then the first 80 % (rounded) for training and the rest for validation.
inline TrainingDataset split_dataset(std::vector<DataRow> rows, std::uint64_t seed, Label label = Label::Overall) {
  if (rows.size() < kMinSplitRows) throw TooFewRows(rows.size(), kMinSplitRows);
  Rng rng(seed);
  rng.shuffle(std::span<DataRow>(rows));
  const std::size_t n_train = (8 * rows.size() + 5) / 10;
  TrainingDataset ds;
  ds.label = label;
  ds.train.assign(std::make_move_iterator(rows.begin()),
                  std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(n_train)));
  ds.validation.assign(std::make_move_iterator(rows.begin() + static_cast<std::ptrdiff_t>(n_train)),
                       std::make_move_iterator(rows.end()));
  return ds;
}

// ---------------------------------------------------------------------------------------------
// CSV IO

inline constexpr std::array<std::string_view, 6> kResponseColumns = {"scenario_id", "participant_id", "overall",
                                                                     "content",     "access",         "privacy"};

inline std::vector<ResponseRecord> parse_responses(const CsvTable& t) {
  if (t.header.size() != kResponseColumns.size() ||
      !std::equal(t.header.begin(), t.header.end(), kResponseColumns.begin()))
    throw DatasetError("responses header must be: scenario_id,participant_id,overall,content,access,privacy");
  std::vector<ResponseRecord> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    ResponseRecord rec{row[0], row[1], {}};
    for (std::size_t l = 0; l < kLabelCount; ++l) {
      std::optional<double> v;
      try {
        v = parse_optional_number(row[2 + l]);
      } catch (const CsvError& e) {
        throw DatasetError("responses line " + std::to_string(t.lines[r]) + ": " + e.what());
      }
      if (v && !(*v >= kRatingMin && *v <= kRatingMax))
        throw DatasetError("responses line " + std::to_string(t.lines[r]) + ": rating outside [-5, 5]");
      rec.ratings[l] = v;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

inline std::string write_responses_csv(const std::vector<ResponseRecord>& recs) {
  std::string s = "scenario_id,participant_id,overall,content,access,privacy\n";
  for (const auto& r : recs) {
    s += r.scenario_id + "," + r.participant_id;
    for (const auto& v : r.ratings) s += "," + (v ? format_number(*v) : std::string());
    s += "\n";
  }
  return s;
}

/// Feature CSV keyed by `scenario_id`, with the 23 named feature columns in any order.
inline FeatureTable parse_feature_table(const CsvTable& t) {
  const std::size_t id_col = t.require_column("scenario_id");
  std::array<std::size_t, kFeatureCount> cols{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    auto c = t.column(kFeatureNames[f]);
    if (!c) throw DatasetError("feature CSV is missing column '" + std::string(kFeatureNames[f]) + "'");
    cols[f] = *c;
  }
  FeatureTable out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    FeatureVector v{};
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      try {
        v[f] = parse_optional_number(t.rows[r][cols[f]]).value_or(kAbsentDistance);
      } catch (const CsvError& e) {
        throw DatasetError("features line " + std::to_string(t.lines[r]) + ": " + e.what());
      }
    }
    if (!out.emplace(t.rows[r][id_col], v).second)
      throw DatasetError("duplicate scenario_id '" + t.rows[r][id_col] + "' in feature CSV");
  }
  return out;
}

inline std::string feature_csv_header(bool with_id) {
  std::string s = with_id ? "scenario_id" : "";
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!s.empty()) s += ",";
    s += kFeatureNames[f];
  }
  return s + "\n";
}

inline std::string feature_csv_row(const FeatureVector& v, const std::string* id = nullptr) {
  std::string s = id ? *id : "";
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (f > 0 || id) s += ",";
    const bool distance = f >= 14 && f < 20;
    s += (distance && v[f] < 0.0) ? std::string() : format_number(v[f]);
  }
  return s + "\n";
}

inline std::string write_feature_table(const FeatureTable& t) {
  std::string s = feature_csv_header(true);
  for (const auto& [id, v] : t) s += feature_csv_row(v, &id);
  return s;
}

}  // namespace viewscope

#pragma once

// The 23 window-view variables and their flat numeric encoding.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "viewscope/scene.hpp"

namespace viewscope {

inline constexpr std::size_t kFeatureCount = 23;

/// Column names, in model-input order.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "Wn", "Was", "Z1r", "Z2r", "Z3r", "Z4r", "Br", "Er", "Tr", "Pr", "Gr", "Wr",
    "Dr", "Sr",  "Bd",  "Ed",  "Td",  "Gd",  "Wd", "Dd", "EN", "FH", "SC"};

/// Stand-in for a distance whose category was never hit.
inline constexpr double kAbsentDistance = -1.0;

using FeatureVector = std::array<double, kFeatureCount>;

/// Categories that carry a perceived-distance field (pavement and sky do not).
inline constexpr std::array<ElementCategory, 6> kDistanceCategories = {
    ElementCategory::Building, ElementCategory::Equipment, ElementCategory::Tree,
    ElementCategory::GroundVegetation, ElementCategory::Water, ElementCategory::Dynamic};

struct ViewFeatures {
  int wn = 0;
  double was = 0.0;
  std::array<double, 4> zones{};                    // Z1r..Z4r
  std::array<double, kViewCategoryCount> ratios{};  // Br Er Tr Pr Gr Wr Dr Sr
  std::array<std::optional<double>, 6> distances;   // Bd Ed Td Gd Wd Dd
  int en = 0;
  double fh = 0.0;
  int sc = 0;

  double ratio(ElementCategory c) const { return ratios[static_cast<std::size_t>(c)]; }
  std::optional<double> distance(ElementCategory c) const {
    for (std::size_t i = 0; i < kDistanceCategories.size(); ++i)
      if (kDistanceCategories[i] == c) return distances[i];
    return std::nullopt;
  }

  FeatureVector to_vector() const {
    FeatureVector v{};
    v[0] = wn;
    v[1] = was;
    for (std::size_t i = 0; i < 4; ++i) v[2 + i] = zones[i];
    for (std::size_t i = 0; i < kViewCategoryCount; ++i) v[6 + i] = ratios[i];
    for (std::size_t i = 0; i < 6; ++i) v[14 + i] = distances[i].value_or(kAbsentDistance);
    v[20] = en;
    v[21] = fh;
    v[22] = sc;
    return v;
  }

  static ViewFeatures from_vector(const FeatureVector& v) {
    ViewFeatures f;
    f.wn = static_cast<int>(std::lround(v[0]));
    f.was = v[1];
    for (std::size_t i = 0; i < 4; ++i) f.zones[i] = v[2 + i];
    for (std::size_t i = 0; i < kViewCategoryCount; ++i) f.ratios[i] = v[6 + i];
    for (std::size_t i = 0; i < 6; ++i)
      if (v[14 + i] >= 0.0) f.distances[i] = v[14 + i];
    f.en = static_cast<int>(std::lround(v[20]));
    f.fh = v[21];
    f.sc = static_cast<int>(std::lround(v[22]));
    return f;
  }

  friend bool operator==(const ViewFeatures&, const ViewFeatures&) = default;
};

inline std::optional<std::size_t> feature_index(std::string_view name) {
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
    if (kFeatureNames[i] == name) return i;
  return std::nullopt;
}

}  // namespace viewscope

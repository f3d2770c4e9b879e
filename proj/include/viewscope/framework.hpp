#pragma once

// Analytic view-quality framework: layer presence weights, weighting factors, view content,
// view access from window subtense, and the product index, plus the bipolar ±5 rescaling used to
// compare against satisfaction ratings.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "viewscope/features.hpp"
#include "viewscope/raycaster.hpp"
#include "viewscope/scene.hpp"

namespace viewscope {

class OutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NoWindow : public std::runtime_error {
 public:
  NoWindow() : std::runtime_error("room has no windows; view angle is 0") {}
};

inline constexpr double kLayerPresent = 0.25;

struct LayerWeights {
  double l_sky = 0.0;
  double l_landscape = 0.0;
  double l_ground = 0.0;
  double l_nature = 0.0;
  double wf_ct_dis = 0.0;
  double wf_movement = 0.5;
  double wf_nature = 0.0;
  friend bool operator==(const LayerWeights&, const LayerWeights&) = default;
};

/// Membership check for the enumerated value sets of each field.
inline bool is_valid(const LayerWeights& l) {
  auto in = [](double v, std::initializer_list<double> set) {
    return std::any_of(set.begin(), set.end(), [v](double s) { return v == s; });
  };
  return in(l.l_sky, {0.0, 0.25}) && in(l.l_landscape, {0.0, 0.25}) && in(l.l_ground, {0.0, 0.25}) &&
         in(l.l_nature, {0.0, 0.25}) && in(l.wf_ct_dis, {0.0, 0.5, 0.75, 1.0}) &&
         in(l.wf_movement, {0.0, 0.5, 1.0}) && in(l.wf_nature, {0.0, 0.5, 0.75, 1.0});
}

inline double content_distance_factor(double distance_m) {
  if (distance_m <= 6.0) return 0.0;
  if (distance_m <= 20.0) return 0.5;
  if (distance_m <= 50.0) return 0.75;
  return 1.0;
}

inline double nature_factor(double nature_fraction) {
  if (nature_fraction <= 0.0) return 0.0;
  if (nature_fraction <= 0.25) return 0.5;
  if (nature_fraction <= 0.5) return 0.75;
  return 1.0;
}

inline double movement_factor(double dynamic_ratio, std::optional<double> dynamic_distance) {
  if (!(dynamic_ratio > 0.0)) return 0.5;
  return dynamic_distance.value_or(0.0) > 6.0 ? 1.0 : 0.0;
}

/// Automates the manual layer assessment from ray-cast features; presence means ratio > 0.
inline LayerWeights derive_layers(const ViewFeatures& f) {
  using C = ElementCategory;
  LayerWeights l;
  const double landscape = f.ratio(C::Building) + f.ratio(C::Equipment);
  const double ground = f.ratio(C::ArtificialGround) + f.ratio(C::GroundVegetation) + f.ratio(C::Water);
  const double nature = f.ratio(C::Tree) + f.ratio(C::GroundVegetation) + f.ratio(C::Water);
  l.l_sky = f.ratio(C::Sky) > 0.0 ? kLayerPresent : 0.0;
  l.l_landscape = landscape > 0.0 ? kLayerPresent : 0.0;
  l.l_ground = ground > 0.0 ? kLayerPresent : 0.0;
  l.l_nature = nature > 0.0 ? kLayerPresent : 0.0;

  // content distance: buildings, falling back to equipment when no building is visible
  if (auto bd = f.distance(C::Building)) {
    l.wf_ct_dis = content_distance_factor(*bd);
  } else if (auto ed = f.distance(C::Equipment)) {
    l.wf_ct_dis = content_distance_factor(*ed);
  }
  l.wf_movement = movement_factor(f.ratio(C::Dynamic), f.distance(C::Dynamic));
  l.wf_nature = nature_factor(nature);
  return l;
}

inline double content_score(const LayerWeights& l) {
  const double v = l.l_sky + l.l_landscape * l.wf_ct_dis + l.l_ground * l.wf_movement + l.l_nature * l.wf_nature;
  return std::clamp(v, 0.0, 1.0);
}

// ---------------------------------------------------------------------------------------------
// View access

enum class AngleKind { Vertical, Horizontal, SmallerOfTwo };

/// Reference-angle rows for view access.
enum class AccessRow { SkyOrGround, LandscapeNoNature, LandscapeWithNature, LandscapeWithSkyOrGround };

struct AccessReference {
  AngleKind kind;
  double alpha_min;
  std::optional<double> alpha_sat;
};

inline AccessReference access_reference(AccessRow row) {
  switch (row) {
    case AccessRow::SkyOrGround: return {AngleKind::Vertical, 30.0, std::nullopt};
    case AccessRow::LandscapeNoNature: return {AngleKind::SmallerOfTwo, 11.0, 90.0};
    case AccessRow::LandscapeWithNature: return {AngleKind::SmallerOfTwo, 9.0, 50.0};
    case AccessRow::LandscapeWithSkyOrGround: return {AngleKind::Horizontal, 14.0, 54.0};
  }
  return {AngleKind::SmallerOfTwo, 11.0, 90.0};
}

/// Picks the reference row: content below 0.5 uses the single-layer rows, otherwise the
/// landscape rows; nature presence and landscape presence pick within each pair.
inline AccessRow select_access_row(const LayerWeights& l) {
  const double content = content_score(l);
  if (content < 0.5) return l.l_landscape > 0.0 ? AccessRow::LandscapeNoNature : AccessRow::SkyOrGround;
  return l.l_nature > 0.0 ? AccessRow::LandscapeWithNature : AccessRow::LandscapeWithSkyOrGround;
}

struct AccessAngles {
  double alpha_view = 0.0;
  double alpha_min = 0.0;
  std::optional<double> alpha_sat;
  AngleKind angle_kind = AngleKind::SmallerOfTwo;
};

/// Horizontal and vertical angular extent (degrees) of all window vertices, measured in the view
/// frame: azimuth atan2(right, forward) and elevation atan2(up, forward).
struct WindowSubtense {
  double horizontal = 0.0;
  double vertical = 0.0;
};

inline WindowSubtense window_subtense(const RoomModel& room, const ViewpointSpec& vp) {
  if (room.windows.empty()) return {};
  const CameraBasis cam = camera_basis(vp.direction);
  double h_lo = std::numeric_limits<double>::infinity(), h_hi = -h_lo;
  double v_lo = h_lo, v_hi = -h_lo;
  for (const auto& w : room.windows) {
    for (const auto& p : w.polygon) {
      const Vec3 d = p - vp.position;
      const double f = dot(d, cam.forward);
      const double h = std::atan2(dot(d, cam.right), f) * 180.0 / kPi;
      const double v = std::atan2(dot(d, cam.up), f) * 180.0 / kPi;
      h_lo = std::min(h_lo, h);
      h_hi = std::max(h_hi, h);
      v_lo = std::min(v_lo, v);
      v_hi = std::max(v_hi, v);
    }
  }
  return {std::min(180.0, h_hi - h_lo), std::min(180.0, v_hi - v_lo)};
}

inline AccessAngles access_angles_from_subtense(WindowSubtense s, AccessRow row) {
  const AccessReference ref = access_reference(row);
  AccessAngles a;
  a.angle_kind = ref.kind;
  a.alpha_min = ref.alpha_min;
  a.alpha_sat = ref.alpha_sat;
  switch (ref.kind) {
    case AngleKind::Vertical: a.alpha_view = s.vertical; break;
    case AngleKind::Horizontal: a.alpha_view = s.horizontal; break;
    case AngleKind::SmallerOfTwo: a.alpha_view = std::min(s.horizontal, s.vertical); break;
  }
  return a;
}

/// α_view for the given row. Throws NoWindow when the room has no windows.
inline AccessAngles compute_view_angle(const RoomModel& room, const ViewpointSpec& vp, AccessRow row) {
  if (room.windows.empty()) throw NoWindow();
  return access_angles_from_subtense(window_subtense(room, vp), row);
}

/// Piecewise access score; the interior branch interpolates linearly from 0.5 at α_min to 1 at
/// α_sat. Without a saturation angle, anything beyond α_min scores 1.
inline double access_score(const AccessAngles& a) {
  const double v = a.alpha_view;
  if (a.alpha_sat && v >= *a.alpha_sat) return 1.0;
  if (v == a.alpha_min) return 0.5;
  if (v < a.alpha_min) return 0.0;
  if (!a.alpha_sat) return 1.0;
  return 0.5 + 0.5 * (v - a.alpha_min) / (*a.alpha_sat - a.alpha_min);
}

// ---------------------------------------------------------------------------------------------
// Combined index

inline double scale_bipolar(double v) {
  if (!(v >= -1e-9 && v <= 1.0 + 1e-9)) throw OutOfRange("value " + std::to_string(v) + " outside [0, 1]");
  return 10.0 * v - 5.0;
}

/// Inverse of scale_bipolar, for consuming values already printed on the ±5 scale.
inline double unscale_bipolar(double s) { return (s + 5.0) / 10.0; }

struct FrameworkScores {
  double v_content = 0.0;
  double v_access = 0.0;
  double vqi = 0.0;
  double scaled_content = -5.0;
  double scaled_access = -5.0;
  double scaled_vqi = -5.0;
};

/// Clarity is fixed at 1, so the index is content times access.
inline FrameworkScores vqi(double v_content, double v_access) {
  FrameworkScores s;
  s.v_content = v_content;
  s.v_access = v_access;
  s.vqi = v_content * v_access;
  s.scaled_content = scale_bipolar(v_content);
  s.scaled_access = scale_bipolar(v_access);
  s.scaled_vqi = scale_bipolar(s.vqi);
  return s;
}

/// Full evaluation from ray-cast features and window geometry.
inline FrameworkScores evaluate_framework(const LayerWeights& layers, WindowSubtense subtense) {
  const double content = content_score(layers);
  const double access = access_score(access_angles_from_subtense(subtense, select_access_row(layers)));
  return vqi(content, access);
}

}  // namespace viewscope

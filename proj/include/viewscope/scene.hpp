#pragma once

// Labeled scene, room and viewpoint data model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "viewscope/geometry.hpp"

namespace viewscope {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& locus, const std::string& what)
      : std::runtime_error(locus.empty() ? what : locus + ": " + what), locus_(locus) {}
  const std::string& locus() const { return locus_; }

 private:
  std::string locus_;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string s = "scene validation failed:";
    for (const auto& item : p) s += "\n  " + item;
    return s;
  }
  std::vector<std::string> problems_;
};

/// The eight view categories first (in feature order), then the room-only labels.
enum class ElementCategory : std::uint8_t {
  Building,
  Equipment,
  Tree,
  ArtificialGround,
  GroundVegetation,
  Water,
  Dynamic,
  Sky,
  Wall,
  Floor,
  Ceiling,
  Window,
};

inline constexpr std::size_t kViewCategoryCount = 8;

inline constexpr std::array<std::string_view, 12> kCategoryNames = {
    "building", "equipment", "tree", "artificial_ground", "ground_vegetation", "water",
    "dynamic",  "sky",       "wall", "floor",             "ceiling",           "window"};

constexpr std::string_view to_string(ElementCategory c) { return kCategoryNames[static_cast<std::size_t>(c)]; }

inline std::optional<ElementCategory> category_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == s) return static_cast<ElementCategory>(i);
  }
  return std::nullopt;
}

constexpr bool is_view_category(ElementCategory c) { return static_cast<std::size_t>(c) < kViewCategoryCount; }
constexpr bool is_room_surface(ElementCategory c) {
  return c == ElementCategory::Wall || c == ElementCategory::Floor || c == ElementCategory::Ceiling;
}
constexpr bool is_ground(ElementCategory c) {
  return c == ElementCategory::ArtificialGround || c == ElementCategory::GroundVegetation ||
         c == ElementCategory::Water;
}

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  Triangle triangle(std::size_t i) const {
    const auto& t = triangles[i];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  friend bool operator==(const Mesh&, const Mesh&) = default;
};

struct LabeledMesh {
  ElementCategory category = ElementCategory::Building;
  Mesh mesh;
  friend bool operator==(const LabeledMesh&, const LabeledMesh&) = default;
};

struct SkyDome {
  Vec3 center;
  double radius = 50'000.0;
  friend bool operator==(const SkyDome&, const SkyDome&) = default;
};

inline constexpr double kMinSkyRadius = 50'000.0;

struct Scene {
  std::vector<LabeledMesh> objects;
  SkyDome sky_dome;
  std::optional<double> ground_elevation_override;
  friend bool operator==(const Scene&, const Scene&) = default;
};

struct WindowPolygon {
  std::vector<Vec3> polygon;

  double area() const { return norm(polygon_vector_area(polygon)); }
  friend bool operator==(const WindowPolygon&, const WindowPolygon&) = default;
};

struct RoomModel {
  std::vector<LabeledMesh> shell;  // Wall / Floor / Ceiling
  std::vector<WindowPolygon> windows;
  friend bool operator==(const RoomModel&, const RoomModel&) = default;
};

struct ViewpointSpec {
  Vec3 position{0.0, 0.0, 1.2};
  Vec3 direction{0.0, 1.0, 0.0};
  double fov_deg = 70.0;  // horizontal
  std::array<int, 2> aspect{3, 2};
  std::array<int, 2> resolution{366, 244};
  int sky_condition = 2;
  std::optional<double> floor_height_override;
  friend bool operator==(const ViewpointSpec&, const ViewpointSpec&) = default;
};

struct SceneBundle {
  Scene scene;
  RoomModel room;
  ViewpointSpec viewpoint;
  friend bool operator==(const SceneBundle&, const SceneBundle&) = default;
};

struct WindowMetrics {
  std::size_t count = 0;  // Wn
  double area = 0.0;      // Was, m²
};

/// Wn and Was. The area is summed over a triangulation of each polygon.
inline WindowMetrics window_metrics(const RoomModel& room) {
  WindowMetrics m;
  m.count = room.windows.size();
  for (const auto& w : room.windows) {
    const auto tris = triangulate_polygon(w.polygon);
    for (const auto& t : tris) {
      m.area += Triangle{w.polygon[t[0]], w.polygon[t[1]], w.polygon[t[2]]}.area();
    }
  }
  return m;
}

inline constexpr double kDegenerateArea = 1e-12;
inline constexpr double kWindowPlanarTolerance = 1e-6;
inline constexpr double kWindowWallTolerance = 0.01;

/// Distance from the viewpoint to the farthest non-sky vertex.
inline double bounding_radius(const Scene& scene, const RoomModel& room, Vec3 from) {
  double r = 0.0;
  auto visit = [&](const Mesh& m) {
    for (const auto& v : m.vertices) r = std::max(r, norm(v - from));
  };
  for (const auto& o : scene.objects) visit(o.mesh);
  for (const auto& s : room.shell) visit(s.mesh);
  for (const auto& w : room.windows)
    for (const auto& v : w.polygon) r = std::max(r, norm(v - from));
  return r;
}

inline SkyDome synthesize_sky_dome(const Scene& scene, const RoomModel& room, const ViewpointSpec& vp) {
  return {vp.position, std::max(kMinSkyRadius, 2.0 * bounding_radius(scene, room, vp.position))};
}

namespace detail {

inline bool finite(Vec3 v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

inline void check_mesh(const Mesh& mesh, const std::string& name, std::vector<std::string>& report) {
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (!finite(mesh.vertices[i])) report.push_back("non-finite-vertex: " + name + " vertex " + std::to_string(i));
  }
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    if (t[0] >= mesh.vertices.size() || t[1] >= mesh.vertices.size() || t[2] >= mesh.vertices.size()) {
      report.push_back("triangle-index-out-of-range: " + name + " triangle " + std::to_string(i));
      continue;
    }
    if (!(mesh.triangle(i).area() > kDegenerateArea)) {
      report.push_back("degenerate-triangle: " + name + " triangle " + std::to_string(i));
    }
  }
}

inline std::vector<Triangle> enclosure_triangles(const RoomModel& room) {
  std::vector<Triangle> tris;
  for (const auto& s : room.shell)
    for (std::size_t i = 0; i < s.mesh.triangles.size(); ++i) tris.push_back(s.mesh.triangle(i));
  for (const auto& w : room.windows)
    for (const auto& t : triangulate_polygon(w.polygon))
      tris.push_back({w.polygon[t[0]], w.polygon[t[1]], w.polygon[t[2]]});
  return tris;
}

}  // namespace detail

/// True when rays along the six axis directions from `p` all hit a shell or window surface.
inline bool point_enclosed_by_room(const RoomModel& room, Vec3 p) {
  const auto tris = detail::enclosure_triangles(room);
  // slightly skewed axes so rays do not run exactly along shared triangle edges
  const std::array<Vec3, 6> dirs = {
      normalized({1.0, 1e-7, 2e-7}),  normalized({-1.0, 2e-7, 1e-7}), normalized({1e-7, 1.0, 3e-7}),
      normalized({3e-7, -1.0, 1e-7}), normalized({2e-7, 1e-7, 1.0}),  normalized({1e-7, 3e-7, -1.0})};
  for (const auto& d : dirs) {
    const Ray r{p, d};
    const bool hit = std::any_of(tris.begin(), tris.end(), [&](const Triangle& t) { return intersect(r, t).has_value(); });
    if (!hit) return false;
  }
  return true;
}

/// Report-only validation; an empty result means the bundle satisfies every model invariant.
inline std::vector<std::string> validate_scene(const Scene& scene, const RoomModel& room, const ViewpointSpec& vp) {
  std::vector<std::string> report;

  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const auto& o = scene.objects[i];
    const std::string name = "object " + std::to_string(i) + " (" + std::string(to_string(o.category)) + ")";
    if (!is_view_category(o.category)) report.push_back("room-label-in-context: " + name);
    if (o.category == ElementCategory::Sky) report.push_back("sky-mesh-object: " + name + " (sky is the dome)");
    detail::check_mesh(o.mesh, name, report);
  }
  for (std::size_t i = 0; i < room.shell.size(); ++i) {
    const auto& s = room.shell[i];
    const std::string name = "shell " + std::to_string(i) + " (" + std::string(to_string(s.category)) + ")";
    if (!is_room_surface(s.category)) report.push_back("context-label-in-shell: " + name);
    detail::check_mesh(s.mesh, name, report);
  }

  std::vector<Triangle> walls;
  for (const auto& s : room.shell) {
    if (s.category != ElementCategory::Wall) continue;
    for (std::size_t i = 0; i < s.mesh.triangles.size(); ++i) {
      const auto& t = s.mesh.triangles[i];
      if (t[0] < s.mesh.vertices.size() && t[1] < s.mesh.vertices.size() && t[2] < s.mesh.vertices.size())
        walls.push_back(s.mesh.triangle(i));
    }
  }
  for (std::size_t w = 0; w < room.windows.size(); ++w) {
    const auto& poly = room.windows[w].polygon;
    const std::string name = "window " + std::to_string(w);
    if (poly.size() < 3) {
      report.push_back("window-too-few-vertices: " + name);
      continue;
    }
    if (!std::all_of(poly.begin(), poly.end(), detail::finite)) {
      report.push_back("non-finite-vertex: " + name);
      continue;
    }
    const Vec3 va = polygon_vector_area(poly);
    const double a = norm(va);
    if (!(a > kDegenerateArea)) {
      report.push_back("degenerate-window: " + name);
      continue;
    }
    const Vec3 n = va / a;
    for (const auto& p : poly) {
      if (std::abs(dot(p - poly[0], n)) > kWindowPlanarTolerance) {
        report.push_back("window-not-planar: " + name);
        break;
      }
    }
    for (const auto& p : poly) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : walls) best = std::min(best, point_triangle_distance(p, t));
      if (best > kWindowWallTolerance) {
        report.push_back("window-off-wall: " + name);
        break;
      }
    }
  }

  if (vp.resolution[0] < 2 || vp.resolution[1] < 2) report.push_back("resolution-too-small");
  if (!(vp.fov_deg > 0.0 && vp.fov_deg < 180.0)) report.push_back("fov-out-of-range");
  if (vp.aspect[0] <= 0 || vp.aspect[1] <= 0) report.push_back("aspect-invalid");
  if (!detail::finite(vp.direction) || std::abs(norm(vp.direction) - 1.0) > 1e-9) report.push_back("direction-not-unit");
  if (vp.sky_condition < 0 || vp.sky_condition > 2) report.push_back("sky-condition-invalid");
  if (vp.floor_height_override && !std::isfinite(*vp.floor_height_override))
    report.push_back("floor-height-override-invalid");
  if (!detail::finite(vp.position)) {
    report.push_back("viewpoint-non-finite");
  } else if (!point_enclosed_by_room(room, vp.position)) {
    report.push_back("viewpoint-outside-room");
  }

  if (!(scene.sky_dome.radius > 0.0) ||
      scene.sky_dome.radius < bounding_radius(scene, room, scene.sky_dome.center)) {
    report.push_back("sky-dome-too-small");
  } else if (norm(vp.position - scene.sky_dome.center) >= scene.sky_dome.radius) {
    report.push_back("viewpoint-outside-sky-dome");
  }
  return report;
}

}  // namespace viewscope

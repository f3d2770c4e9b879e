#pragma once

// Two-stage window-view ray casting.
//
// Stage 1 classifies every pixel ray of the view frame against the room (walls, floor, ceiling,
// window apertures). Rays that leave through a window are continued in stage 2 from the window
// point into the labeled context model, which is closed by the sky dome.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "viewscope/bvh.hpp"
#include "viewscope/features.hpp"
#include "viewscope/parallel.hpp"
#include "viewscope/scene.hpp"

namespace viewscope {

class EscapedRay : public std::runtime_error {
 public:
  EscapedRay(int i, int j)
      : std::runtime_error("ray at pixel (" + std::to_string(i) + ", " + std::to_string(j) +
                           ") left the room without hitting any surface; the room model is leaky"),
        pixel_i(i),
        pixel_j(j) {}
  int pixel_i;
  int pixel_j;
};

class NoGroundFound : public std::runtime_error {
 public:
  NoGroundFound()
      : std::runtime_error("no ground surface below the viewpoint; supply a floor height override") {}
};

inline constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------------------------
// Ray grid

/// Camera basis for a view direction; z-up, with a y-axis fallback when looking straight up/down.
struct CameraBasis {
  Vec3 forward, right, up;
};

inline CameraBasis camera_basis(Vec3 direction) {
  const Vec3 f = normalized(direction);
  Vec3 r = cross(f, Vec3{0.0, 0.0, 1.0});
  if (norm(r) < 1e-12) r = cross(f, Vec3{0.0, 1.0, 0.0});
  r = normalized(r);
  return {f, r, cross(r, f)};
}

/// Pixel-center rays through a perspective frame; row 0 is the top of the frame.
struct RayGrid {
  int width = 0;
  int height = 0;
  Vec3 origin;
  std::vector<Vec3> directions;  // row-major, index = j * width + i

  std::size_t size() const { return directions.size(); }
  Ray ray(std::size_t k) const { return {origin, directions[k]}; }
};

inline RayGrid make_ray_grid(const ViewpointSpec& vp) {
  RayGrid g;
  g.width = vp.resolution[0];
  g.height = vp.resolution[1];
  g.origin = vp.position;
  const CameraBasis cam = camera_basis(vp.direction);
  const double half_w = std::tan(0.5 * vp.fov_deg * kPi / 180.0);
  const double half_h = half_w * static_cast<double>(vp.aspect[1]) / static_cast<double>(vp.aspect[0]);
  g.directions.resize(static_cast<std::size_t>(g.width) * static_cast<std::size_t>(g.height));
  for (int j = 0; j < g.height; ++j) {
    const double v = (1.0 - 2.0 * (j + 0.5) / g.height) * half_h;
    for (int i = 0; i < g.width; ++i) {
      const double u = (2.0 * (i + 0.5) / g.width - 1.0) * half_w;
      g.directions[static_cast<std::size_t>(j) * g.width + i] = normalized(cam.forward + cam.right * u + cam.up * v);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------------------------
// Indices

/// Room shell and window apertures, each behind its own hierarchy.
class RoomIndex {
 public:
  explicit RoomIndex(const RoomModel& room) {
    std::vector<Triangle> shell;
    for (const auto& s : room.shell) {
      for (std::size_t i = 0; i < s.mesh.triangles.size(); ++i) {
        shell.push_back(s.mesh.triangle(i));
        shell_labels_.push_back(s.category);
      }
    }
    std::vector<Triangle> windows;
    for (std::size_t w = 0; w < room.windows.size(); ++w) {
      const auto& poly = room.windows[w].polygon;
      const Vec3 n = normalized(polygon_vector_area(poly));
      for (const auto& t : triangulate_polygon(poly)) {
        windows.push_back({poly[t[0]], poly[t[1]], poly[t[2]]});
        window_of_tri_.push_back(static_cast<std::uint32_t>(w));
        window_normal_.push_back(n);
      }
    }
    shell_ = Bvh(std::move(shell));
    windows_ = Bvh(std::move(windows));
  }

  const Bvh& shell() const { return shell_; }
  const Bvh& windows() const { return windows_; }
  ElementCategory shell_label(std::uint32_t tri) const { return shell_labels_[tri]; }
  std::uint32_t window_of(std::uint32_t tri) const { return window_of_tri_[tri]; }
  Vec3 window_normal(std::uint32_t tri) const { return window_normal_[tri]; }

 private:
  Bvh shell_;
  Bvh windows_;
  std::vector<ElementCategory> shell_labels_;
  std::vector<std::uint32_t> window_of_tri_;
  std::vector<Vec3> window_normal_;
};

/// Context meshes flattened into one hierarchy, plus the sky dome.
class ContextIndex {
 public:
  explicit ContextIndex(const Scene& scene) : dome_(scene.sky_dome) {
    std::vector<Triangle> tris;
    for (std::size_t o = 0; o < scene.objects.size(); ++o) {
      const auto& obj = scene.objects[o];
      for (std::size_t i = 0; i < obj.mesh.triangles.size(); ++i) {
        tris.push_back(obj.mesh.triangle(i));
        object_of_tri_.push_back(static_cast<std::uint32_t>(o));
        category_of_tri_.push_back(obj.category);
      }
    }
    bvh_ = Bvh(std::move(tris));
  }

  const Bvh& bvh() const { return bvh_; }
  const SkyDome& dome() const { return dome_; }
  ElementCategory category(std::uint32_t tri) const { return category_of_tri_[tri]; }
  std::uint32_t object(std::uint32_t tri) const { return object_of_tri_[tri]; }

 private:
  Bvh bvh_;
  SkyDome dome_;
  std::vector<std::uint32_t> object_of_tri_;
  std::vector<ElementCategory> category_of_tri_;
};

/// Nearest-hit accelerator over a set of meshes (flattened in order).
inline Bvh build_accelerator(std::span<const LabeledMesh> meshes) {
  std::vector<Triangle> tris;
  for (const auto& m : meshes)
    for (std::size_t i = 0; i < m.mesh.triangles.size(); ++i) tris.push_back(m.mesh.triangle(i));
  return Bvh(std::move(tris));
}

// ---------------------------------------------------------------------------------------------
// Stage 1

enum class RoomOutcome : std::uint8_t { Wall, Floor, Ceiling, Window };

struct HitRecord {
  int i = 0;
  int j = 0;
  RoomOutcome room = RoomOutcome::Wall;
  double window_t = 0.0;                        // distance to the window plane, window rays only
  std::optional<ElementCategory> category;      // stage 2, window rays only
  double distance = 0.0;                        // stage 2, from the viewpoint
};

struct Stage1Result {
  std::vector<HitRecord> records;  // one per pixel, row-major
  std::size_t window_rays = 0;
  double window_ratio = 0.0;  // window rays / all rays
};

inline Stage1Result stage1_room_cast(const RayGrid& grid, const RoomIndex& room, unsigned threads = default_thread_count()) {
  Stage1Result out;
  out.records.resize(grid.size());
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    const Ray r = grid.ray(k);
    HitRecord& rec = out.records[k];
    rec.i = static_cast<int>(k % static_cast<std::size_t>(grid.width));
    rec.j = static_cast<int>(k / static_cast<std::size_t>(grid.width));
    const auto shell_hit = room.shell().nearest(r);
    const auto window_hit = room.windows().nearest(r);
    if (window_hit) {
      // windows may sit on (or up to 1 cm proud of / inset into) the wall surface
      const double cos_n = std::abs(dot(r.direction, room.window_normal(window_hit->primitive)));
      const double slack = kWindowWallTolerance / std::max(cos_n, 1e-3);
      if (!shell_hit || window_hit->t <= shell_hit->t + slack) {
        rec.room = RoomOutcome::Window;
        rec.window_t = window_hit->t;
        return;
      }
    }
    if (!shell_hit) throw EscapedRay(rec.i, rec.j);
    switch (room.shell_label(shell_hit->primitive)) {
      case ElementCategory::Floor: rec.room = RoomOutcome::Floor; break;
      case ElementCategory::Ceiling: rec.room = RoomOutcome::Ceiling; break;
      default: rec.room = RoomOutcome::Wall; break;
    }
  });
  out.window_rays = static_cast<std::size_t>(std::count_if(
      out.records.begin(), out.records.end(), [](const HitRecord& h) { return h.room == RoomOutcome::Window; }));
  out.window_ratio = grid.size() ? static_cast<double>(out.window_rays) / static_cast<double>(grid.size()) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------------------------
// Stage 2

/// Continues every window ray from its window point; fills category and viewpoint distance.
inline void stage2_context_cast(const RayGrid& grid, Stage1Result& stage1, const ContextIndex& context,
                                unsigned threads = default_thread_count()) {
  parallel_for(grid.size(), threads, [&](std::size_t k) {
    HitRecord& rec = stage1.records[k];
    if (rec.room != RoomOutcome::Window) return;
    const Ray r{grid.origin + grid.directions[k] * rec.window_t, grid.directions[k]};
    const auto dome_t = exit_sphere(r, context.dome().center, context.dome().radius);
    const auto hit = context.bvh().nearest(r, 1e-9, dome_t.value_or(std::numeric_limits<double>::infinity()));
    if (hit) {
      rec.category = context.category(hit->primitive);
      rec.distance = rec.window_t + hit->t;
    } else {
      rec.category = ElementCategory::Sky;
      rec.distance = rec.window_t + dome_t.value_or(context.dome().radius);
    }
  });
}

// ---------------------------------------------------------------------------------------------
// Derived quantities

/// Mean of the closest ceil(0.3 n) distances; nullopt for an empty set.
inline std::optional<double> perceived_distance(std::vector<double> distances) {
  if (distances.empty()) return std::nullopt;
  const std::size_t n = distances.size();
  const std::size_t k = std::max<std::size_t>(1, (3 * n + 9) / 10);
  std::partial_sort(distances.begin(), distances.begin() + static_cast<std::ptrdiff_t>(k), distances.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) sum += distances[i];
  return sum / static_cast<double>(k);
}

/// Rule-of-thirds zone of a pixel: 0 = middle-center, 1 = middle-side, 2 = top, 3 = bottom.
inline int zone_of_pixel(int i, int j, int width, int height) {
  // third index of the pixel center: floor(3 (i + 0.5) / width)
  const int col = std::min(2, (6 * i + 3) / (2 * width));
  const int row = std::min(2, (6 * j + 3) / (2 * height));
  if (row == 0) return 2;
  if (row == 2) return 3;
  return col == 1 ? 0 : 1;
}

inline std::array<double, 4> zone_ratios(const Stage1Result& stage1, const RayGrid& grid) {
  std::array<std::size_t, 4> total{}, window{};
  for (const auto& rec : stage1.records) {
    const auto z = static_cast<std::size_t>(zone_of_pixel(rec.i, rec.j, grid.width, grid.height));
    ++total[z];
    if (rec.room == RoomOutcome::Window) ++window[z];
  }
  std::array<double, 4> out{};
  for (std::size_t z = 0; z < 4; ++z)
    out[z] = total[z] ? static_cast<double>(window[z]) / static_cast<double>(total[z]) : 0.0;
  return out;
}

/// Vertical drop from the viewpoint to the first ground-category surface below it.
inline double floor_height(const ViewpointSpec& vp, const Scene& scene) {
  if (vp.floor_height_override) return *vp.floor_height_override;
  if (scene.ground_elevation_override) return vp.position.z - *scene.ground_elevation_override;
  std::vector<Triangle> ground;
  for (const auto& o : scene.objects) {
    if (!is_ground(o.category)) continue;
    for (std::size_t i = 0; i < o.mesh.triangles.size(); ++i) ground.push_back(o.mesh.triangle(i));
  }
  const auto hit = nearest_hit_brute_force(ground, Ray{vp.position, {0.0, 0.0, -1.0}});
  if (!hit) throw NoGroundFound();
  return hit->t;
}

struct CastOptions {
  unsigned threads = default_thread_count();
};

struct CastResult {
  ViewFeatures features;
  Stage1Result hits;
  RayGrid grid;
};

/// Runs both stages and assembles the full result including per-pixel records.
inline CastResult cast_view(const Scene& scene, const RoomModel& room, const ViewpointSpec& vp,
                            const CastOptions& opt = {}) {
  CastResult res;
  res.grid = make_ray_grid(vp);
  const RoomIndex room_index(room);
  res.hits = stage1_room_cast(res.grid, room_index, opt.threads);
  const ContextIndex context(scene);
  stage2_context_cast(res.grid, res.hits, context, opt.threads);

  ViewFeatures& f = res.features;
  const auto wm = window_metrics(room);
  f.wn = static_cast<int>(wm.count);
  f.was = wm.area;
  f.zones = zone_ratios(res.hits, res.grid);

  std::array<std::size_t, kViewCategoryCount> counts{};
  std::array<std::vector<double>, kViewCategoryCount> dists;
  for (const auto& rec : res.hits.records) {
    if (!rec.category) continue;
    const auto c = static_cast<std::size_t>(*rec.category);
    ++counts[c];
    dists[c].push_back(rec.distance);
  }
  const std::size_t window_rays = res.hits.window_rays;
  for (std::size_t c = 0; c < kViewCategoryCount; ++c) {
    f.ratios[c] = window_rays ? static_cast<double>(counts[c]) / static_cast<double>(window_rays) : 0.0;
    if (f.ratios[c] > 0.0) ++f.en;
  }
  for (std::size_t d = 0; d < kDistanceCategories.size(); ++d)
    f.distances[d] = perceived_distance(dists[static_cast<std::size_t>(kDistanceCategories[d])]);
  f.fh = floor_height(vp, scene);
  f.sc = vp.sky_condition;
  return res;
}

inline ViewFeatures extract_features(const Scene& scene, const RoomModel& room, const ViewpointSpec& vp,
                                     const CastOptions& opt = {}) {
  return cast_view(scene, room, vp, opt).features;
}

inline ViewFeatures extract_features(const SceneBundle& b, const CastOptions& opt = {}) {
  return extract_features(b.scene, b.room, b.viewpoint, opt);
}

}  // namespace viewscope

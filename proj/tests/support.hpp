#pragma once

// Scene builders and paths shared by the test binaries.

#include <filesystem>
#include <string>

#include "viewscope/viewscope.hpp"

namespace vs_test {

using namespace viewscope;

inline std::filesystem::path source_dir() { return VIEWSCOPE_SOURCE_DIR; }
inline std::filesystem::path demo_scene(const std::string& name) { return source_dir() / "demo" / (name + ".json"); }
inline std::filesystem::path fixture_dir() { return source_dir() / "data" / "fixtures"; }

inline Mesh quad(Vec3 a, Vec3 b, Vec3 c, Vec3 d) { return {{a, b, c, d}, {{0, 1, 2}, {0, 2, 3}}}; }

inline Mesh box(Vec3 lo, Vec3 hi) {
  Mesh m;
  m.vertices = {{lo.x, lo.y, lo.z}, {hi.x, lo.y, lo.z}, {hi.x, hi.y, lo.z}, {lo.x, hi.y, lo.z},
                {lo.x, lo.y, hi.z}, {hi.x, lo.y, hi.z}, {hi.x, hi.y, hi.z}, {lo.x, hi.y, hi.z}};
  m.triangles = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7}, {0, 1, 5}, {0, 5, 4},
                 {1, 2, 6}, {1, 6, 5}, {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return m;
}

// 4 x 4 x 3 m room centered on the origin, floor at z = 0; the front wall is y = 2.
inline RoomModel box_room() {
  RoomModel r;
  const double x0 = -2, x1 = 2, y0 = -2, y1 = 2, z0 = 0, z1 = 3;
  r.shell.push_back({ElementCategory::Wall, quad({x0, y1, z0}, {x1, y1, z0}, {x1, y1, z1}, {x0, y1, z1})});
  r.shell.push_back({ElementCategory::Wall, quad({x0, y0, z0}, {x1, y0, z0}, {x1, y0, z1}, {x0, y0, z1})});
  r.shell.push_back({ElementCategory::Wall, quad({x0, y0, z0}, {x0, y1, z0}, {x0, y1, z1}, {x0, y0, z1})});
  r.shell.push_back({ElementCategory::Wall, quad({x1, y0, z0}, {x1, y1, z0}, {x1, y1, z1}, {x1, y0, z1})});
  r.shell.push_back({ElementCategory::Floor, quad({x0, y0, z0}, {x1, y0, z0}, {x1, y1, z0}, {x0, y1, z0})});
  r.shell.push_back({ElementCategory::Ceiling, quad({x0, y0, z1}, {x1, y0, z1}, {x1, y1, z1}, {x0, y1, z1})});
  return r;
}

inline WindowPolygon front_window(double xa, double xb, double za, double zb) {
  return {{{xa, 2, za}, {xb, 2, za}, {xb, 2, zb}, {xa, 2, zb}}};
}

inline LabeledMesh ground_plane(ElementCategory c, double z, double extent = 20000.0) {
  return {c, quad({-extent, -extent, z}, {extent, -extent, z}, {extent, extent, z}, {-extent, extent, z})};
}

// Room with a window covering the whole front wall, context built by the caller.
inline SceneBundle open_front_bundle(double fov_deg = 70.0) {
  SceneBundle b;
  b.room = box_room();
  b.room.windows.push_back(front_window(-1.9, 1.9, 0.1, 2.9));
  b.viewpoint.fov_deg = fov_deg;
  b.viewpoint.floor_height_override = 10.0;
  return b;
}

inline void finish(SceneBundle& b) { b.scene.sky_dome = synthesize_sky_dome(b.scene, b.room, b.viewpoint); }

}  // namespace vs_test

#pragma once

// JSON scene document reader/writer.
//
//   {"units":"m",
//    "objects":[{"category":"building","vertices":[[x,y,z],...],"triangles":[[i,j,k],...]}],
//    "room":{"shell":[{"category":"wall",...}], "windows":[{"polygon":[[x,y,z],...]}]},
//    "viewpoint":{"position":[x,y,z],"direction":[x,y,z],"fov_deg":70,"aspect":[3,2],
//                 "resolution":[366,244],"sky_condition":2,"floor_height":12.0},
//    "sky_dome":{"center":[x,y,z],"radius":50000},          optional, synthesized if absent
//    "ground_elevation":0.0}                                  optional

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "viewscope/scene.hpp"

namespace viewscope {

namespace detail {

using nlohmann::json;

inline const json& require(const json& obj, const char* key, const std::string& locus) {
  if (!obj.is_object()) throw ParseError(locus, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(locus, std::string("missing field '") + key + "'");
  return *it;
}

inline double read_number(const json& j, const std::string& locus) {
  if (!j.is_number()) throw ParseError(locus, "expected a number");
  return j.get<double>();
}

inline Vec3 read_vec3(const json& j, const std::string& locus) {
  if (!j.is_array() || j.size() != 3) throw ParseError(locus, "expected [x, y, z]");
  return {read_number(j[0], locus + "[0]"), read_number(j[1], locus + "[1]"), read_number(j[2], locus + "[2]")};
}

inline std::array<int, 2> read_int_pair(const json& j, const std::string& locus) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw ParseError(locus, "expected [int, int]");
  return {j[0].get<int>(), j[1].get<int>()};
}

inline LabeledMesh read_mesh(const json& j, const std::string& locus) {
  LabeledMesh out;
  const auto& cat = require(j, "category", locus);
  if (!cat.is_string()) throw ParseError(locus + ".category", "expected a string");
  const auto c = category_from_string(cat.get<std::string>());
  if (!c) throw ParseError(locus + ".category", "unknown category '" + cat.get<std::string>() + "'");
  out.category = *c;

  const auto& verts = require(j, "vertices", locus);
  if (!verts.is_array()) throw ParseError(locus + ".vertices", "expected an array");
  for (std::size_t i = 0; i < verts.size(); ++i)
    out.mesh.vertices.push_back(read_vec3(verts[i], locus + ".vertices[" + std::to_string(i) + "]"));

  const auto& tris = require(j, "triangles", locus);
  if (!tris.is_array()) throw ParseError(locus + ".triangles", "expected an array");
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto& t = tris[i];
    const std::string l = locus + ".triangles[" + std::to_string(i) + "]";
    if (!t.is_array() || t.size() != 3) throw ParseError(l, "expected [i, j, k]");
    std::array<std::uint32_t, 3> idx{};
    for (std::size_t k = 0; k < 3; ++k) {
      if (!t[k].is_number_unsigned()) throw ParseError(l, "expected non-negative integer indices");
      idx[k] = t[k].get<std::uint32_t>();
    }
    out.mesh.triangles.push_back(idx);
  }
  return out;
}

inline json write_vec3(Vec3 v) { return json::array({v.x, v.y, v.z}); }

inline json write_mesh(const LabeledMesh& m) {
  json verts = json::array();
  for (const auto& v : m.mesh.vertices) verts.push_back(write_vec3(v));
  json tris = json::array();
  for (const auto& t : m.mesh.triangles) tris.push_back(json::array({t[0], t[1], t[2]}));
  return {{"category", std::string(to_string(m.category))}, {"vertices", verts}, {"triangles", tris}};
}

inline std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

}  // namespace detail

/// Parse a scene document without running validation.
inline SceneBundle parse_scene_text_unvalidated(std::string_view text) {
  using detail::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("line " + std::to_string(detail::line_of_offset(text, e.byte)), "malformed JSON");
  }
  if (!doc.is_object()) throw ParseError("document", "top level must be an object");

  const auto& units = detail::require(doc, "units", "document");
  if (!units.is_string() || units.get<std::string>() != "m")
    throw ParseError("units", "only meters (\"m\") are supported");

  SceneBundle b;
  if (auto it = doc.find("objects"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("objects", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      b.scene.objects.push_back(detail::read_mesh((*it)[i], "objects[" + std::to_string(i) + "]"));
  }

  const auto& room = detail::require(doc, "room", "document");
  if (auto it = room.find("shell"); it != room.end()) {
    if (!it->is_array()) throw ParseError("room.shell", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i)
      b.room.shell.push_back(detail::read_mesh((*it)[i], "room.shell[" + std::to_string(i) + "]"));
  }
  if (auto it = room.find("windows"); it != room.end()) {
    if (!it->is_array()) throw ParseError("room.windows", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string locus = "room.windows[" + std::to_string(i) + "]";
      const auto& poly = detail::require((*it)[i], "polygon", locus);
      if (!poly.is_array()) throw ParseError(locus + ".polygon", "expected an array");
      WindowPolygon w;
      for (std::size_t k = 0; k < poly.size(); ++k)
        w.polygon.push_back(detail::read_vec3(poly[k], locus + ".polygon[" + std::to_string(k) + "]"));
      b.room.windows.push_back(std::move(w));
    }
  }

  const auto& vp = detail::require(doc, "viewpoint", "document");
  if (!vp.is_object()) throw ParseError("viewpoint", "expected an object");
  if (auto it = vp.find("position"); it != vp.end()) {
    b.viewpoint.position = detail::read_vec3(*it, "viewpoint.position");
  } else {
    // room center, 1.2 m above the lowest floor point
    Aabb box;
    double floor_z = std::numeric_limits<double>::infinity();
    for (const auto& s : b.room.shell) {
      for (const auto& v : s.mesh.vertices) {
        box.grow(v);
        if (s.category == ElementCategory::Floor) floor_z = std::min(floor_z, v.z);
      }
    }
    if (box.empty()) throw ParseError("viewpoint.position", "no position given and the room shell is empty");
    if (!std::isfinite(floor_z)) floor_z = box.lo.z;
    b.viewpoint.position = {0.5 * (box.lo.x + box.hi.x), 0.5 * (box.lo.y + box.hi.y), floor_z + 1.2};
  }
  {
    const Vec3 d = detail::read_vec3(detail::require(vp, "direction", "viewpoint"), "viewpoint.direction");
    const double len = norm(d);
    if (!(len > 0.0) || !std::isfinite(len)) throw ParseError("viewpoint.direction", "direction must be non-zero");
    b.viewpoint.direction = std::abs(len - 1.0) > 1e-12 ? d / len : d;
  }
  if (auto it = vp.find("fov_deg"); it != vp.end()) b.viewpoint.fov_deg = detail::read_number(*it, "viewpoint.fov_deg");
  if (auto it = vp.find("aspect"); it != vp.end()) b.viewpoint.aspect = detail::read_int_pair(*it, "viewpoint.aspect");
  if (auto it = vp.find("resolution"); it != vp.end())
    b.viewpoint.resolution = detail::read_int_pair(*it, "viewpoint.resolution");
  if (auto it = vp.find("sky_condition"); it != vp.end()) {
    if (!it->is_number_integer()) throw ParseError("viewpoint.sky_condition", "expected 0, 1 or 2");
    b.viewpoint.sky_condition = it->get<int>();
  }
  if (auto it = vp.find("floor_height"); it != vp.end())
    b.viewpoint.floor_height_override = detail::read_number(*it, "viewpoint.floor_height");

  if (auto it = doc.find("ground_elevation"); it != doc.end())
    b.scene.ground_elevation_override = detail::read_number(*it, "ground_elevation");

  if (auto it = doc.find("sky_dome"); it != doc.end()) {
    b.scene.sky_dome.center = detail::read_vec3(detail::require(*it, "center", "sky_dome"), "sky_dome.center");
    b.scene.sky_dome.radius = detail::read_number(detail::require(*it, "radius", "sky_dome"), "sky_dome.radius");
  } else {
    b.scene.sky_dome = synthesize_sky_dome(b.scene, b.room, b.viewpoint);
  }
  return b;
}

/// Parse and validate; throws ParseError or ValidationError.
inline SceneBundle parse_scene_text(std::string_view text) {
  SceneBundle b = parse_scene_text_unvalidated(text);
  auto report = validate_scene(b.scene, b.room, b.viewpoint);
  if (!report.empty()) throw ValidationError(std::move(report));
  return b;
}

inline std::string read_scene_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "file not found");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SceneBundle parse_scene(const std::filesystem::path& path) { return parse_scene_text(read_scene_file(path)); }

inline std::string serialize_scene(const SceneBundle& b) {
  using detail::json;
  json objects = json::array();
  for (const auto& o : b.scene.objects) objects.push_back(detail::write_mesh(o));
  json shell = json::array();
  for (const auto& s : b.room.shell) shell.push_back(detail::write_mesh(s));
  json windows = json::array();
  for (const auto& w : b.room.windows) {
    json poly = json::array();
    for (const auto& p : w.polygon) poly.push_back(detail::write_vec3(p));
    windows.push_back({{"polygon", poly}});
  }
  const auto& vp = b.viewpoint;
  json viewpoint = {{"position", detail::write_vec3(vp.position)},
                    {"direction", detail::write_vec3(vp.direction)},
                    {"fov_deg", vp.fov_deg},
                    {"aspect", json::array({vp.aspect[0], vp.aspect[1]})},
                    {"resolution", json::array({vp.resolution[0], vp.resolution[1]})},
                    {"sky_condition", vp.sky_condition}};
  if (vp.floor_height_override) viewpoint["floor_height"] = *vp.floor_height_override;
  json doc = {{"units", "m"},
              {"objects", objects},
              {"room", {{"shell", shell}, {"windows", windows}}},
              {"viewpoint", viewpoint},
              {"sky_dome", {{"center", detail::write_vec3(b.scene.sky_dome.center)}, {"radius", b.scene.sky_dome.radius}}}};
  if (b.scene.ground_elevation_override) doc["ground_elevation"] = *b.scene.ground_elevation_override;
  return doc.dump(1);
}

}  // namespace viewscope

#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "support.hpp"

using namespace viewscope;
using namespace vs_test;

namespace {

const char* kMinimal = R"({
  "units": "m",
  "objects": [
    {"category": "building", "vertices": [[-5,20,0],[5,20,0],[5,20,10],[-5,20,10]], "triangles": [[0,1,2],[0,2,3]]}
  ],
  "room": {
    "shell": [
      {"category": "wall", "vertices": [[-2,2,0],[2,2,0],[2,2,3],[-2,2,3]], "triangles": [[0,1,2],[0,2,3]]},
      {"category": "wall", "vertices": [[-2,-2,0],[2,-2,0],[2,-2,3],[-2,-2,3]], "triangles": [[0,1,2],[0,2,3]]},
      {"category": "wall", "vertices": [[-2,-2,0],[-2,2,0],[-2,2,3],[-2,-2,3]], "triangles": [[0,1,2],[0,2,3]]},
      {"category": "wall", "vertices": [[2,-2,0],[2,2,0],[2,2,3],[2,-2,3]], "triangles": [[0,1,2],[0,2,3]]},
      {"category": "floor", "vertices": [[-2,-2,0],[2,-2,0],[2,2,0],[-2,2,0]], "triangles": [[0,1,2],[0,2,3]]},
      {"category": "ceiling", "vertices": [[-2,-2,3],[2,-2,3],[2,2,3],[-2,2,3]], "triangles": [[0,1,2],[0,2,3]]}
    ],
    "windows": [{"polygon": [[-0.75,2,0.5],[0.75,2,0.5],[0.75,2,2.5],[-0.75,2,2.5]]}]
  },
  "viewpoint": {"direction": [0, 1, 0]}
})";

SceneBundle valid_bundle() {
  SceneBundle b = open_front_bundle();
  b.scene.objects.push_back({ElementCategory::Building, box({-5, 20, 0}, {5, 30, 10})});
  finish(b);
  return b;
}

}  // namespace

TEST(SceneParse, MinimalFileGivesOneObjectAndOneWindow) {
  const auto b = parse_scene_text(kMinimal);
  EXPECT_EQ(b.scene.objects.size(), 1u);
  EXPECT_EQ(b.scene.objects[0].category, ElementCategory::Building);
  EXPECT_EQ(window_metrics(b.room).count, 1u);
  EXPECT_DOUBLE_EQ(window_metrics(b.room).area, 3.0);
}

TEST(SceneParse, DefaultViewpointSitsAtRoomCenterAboveFloor) {
  const auto b = parse_scene_text(kMinimal);
  EXPECT_EQ(b.viewpoint.position, (Vec3{0, 0, 1.2}));
  EXPECT_EQ(b.viewpoint.resolution, (std::array<int, 2>{366, 244}));
  EXPECT_EQ(b.viewpoint.aspect, (std::array<int, 2>{3, 2}));
  EXPECT_DOUBLE_EQ(b.viewpoint.fov_deg, 70.0);
  EXPECT_EQ(b.viewpoint.sky_condition, 2);
}

TEST(SceneParse, MisspelledCategoryIsNamed) {
  std::string text = kMinimal;
  text.replace(text.find("\"building\""), 10, "\"buidling\"");
  try {
    parse_scene_text(text);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("buidling"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("objects[0]"), std::string::npos);
  }
}

TEST(SceneParse, MalformedJsonReportsLine) {
  try {
    parse_scene_text("{\n \"units\": \"m\",\n \"objects\": [,]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(SceneParse, WrongUnitsRejected) {
  std::string text = kMinimal;
  text.replace(text.find("\"m\""), 3, "\"ft\"");
  EXPECT_THROW(parse_scene_text(text), ParseError);
}

TEST(SceneParse, MissingFileSaysFileNotFound) {
  try {
    parse_scene(source_dir() / "no_such_scene.json");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("file not found"), std::string::npos);
  }
}

TEST(SceneParse, BoxHalfWindowAreaMatchesAuthoredRectangle) {
  const auto b = parse_scene(demo_scene("box_half_window"));
  // authored window spans x in [-1.9, 1.9] and z in [0.1, 2.9]
  EXPECT_NEAR(window_metrics(b.room).area, 3.8 * 2.8, 1e-9);
  EXPECT_EQ(window_metrics(b.room).count, 1u);
}

TEST(SceneParse, AllDemoScenesValidate) {
  for (const char* name : {"box_half_window", "half_wall_window", "thirds_window"}) {
    const auto b = parse_scene_text_unvalidated(read_scene_file(demo_scene(name)));
    EXPECT_TRUE(validate_scene(b.scene, b.room, b.viewpoint).empty()) << name;
  }
}

TEST(SceneParse, RoundTripPreservesBundle) {
  const auto b = parse_scene(demo_scene("thirds_window"));
  const auto again = parse_scene_text(serialize_scene(b));
  EXPECT_EQ(again, b);
}

TEST(SceneParse, DirectionIsNormalized) {
  std::string text = kMinimal;
  text.replace(text.find("[0, 1, 0]"), 9, "[0, 3, 0]");
  const auto b = parse_scene_text(text);
  EXPECT_EQ(b.viewpoint.direction, (Vec3{0, 1, 0}));
}

TEST(WindowMetrics, NoWindows) {
  RoomModel r = box_room();
  const auto m = window_metrics(r);
  EXPECT_EQ(m.count, 0u);
  EXPECT_EQ(m.area, 0.0);
}

TEST(WindowMetrics, SingleRectangle) {
  RoomModel r = box_room();
  r.windows.push_back(front_window(0, 1.5, 0.5, 2.5));
  const auto m = window_metrics(r);
  EXPECT_EQ(m.count, 1u);
  EXPECT_NEAR(m.area, 3.0, 1e-12);
}

TEST(WindowMetrics, TwoRectanglesSum) {
  RoomModel r = box_room();
  r.windows.push_back(front_window(-1.5, -0.5, 1.0, 2.0));
  r.windows.push_back(front_window(0.0, 1.0, 0.0, 2.5));
  const auto m = window_metrics(r);
  EXPECT_EQ(m.count, 2u);
  EXPECT_NEAR(m.area, 3.5, 1e-12);
}

TEST(WindowMetrics, ConcaveLShapeArea) {
  // L shape: 2 x 2 square minus its 1 x 1 upper right corner
  RoomModel r = box_room();
  r.windows.push_back({{{-1, 2, 0.5}, {1, 2, 0.5}, {1, 2, 1.5}, {0, 2, 1.5}, {0, 2, 2.5}, {-1, 2, 2.5}}});
  EXPECT_NEAR(window_metrics(r).area, 3.0, 1e-12);
}

TEST(Validate, ValidBundleHasEmptyReport) {
  const auto b = valid_bundle();
  EXPECT_TRUE(validate_scene(b.scene, b.room, b.viewpoint).empty());
}

bool report_has(const std::vector<std::string>& report, const std::string& code) {
  for (const auto& r : report)
    if (r.rfind(code, 0) == 0) return true;
  return false;
}

TEST(Validate, ViewpointOutsideRoom) {
  auto b = valid_bundle();
  b.viewpoint.position = {0, 8, 1.2};
  EXPECT_TRUE(report_has(validate_scene(b.scene, b.room, b.viewpoint), "viewpoint-outside-room"));
}

TEST(Validate, DegenerateTriangleNamesMeshAndIndex) {
  auto b = valid_bundle();
  auto& m = b.scene.objects[0].mesh;
  m.vertices.push_back({1, 1, 1});
  m.triangles.push_back({8, 8, 0});
  const auto report = validate_scene(b.scene, b.room, b.viewpoint);
  ASSERT_EQ(report.size(), 1u);
  EXPECT_NE(report[0].find("degenerate-triangle"), std::string::npos);
  EXPECT_NE(report[0].find("object 0"), std::string::npos);
  EXPECT_NE(report[0].find("triangle 12"), std::string::npos);
}

TEST(Validate, RoomLabelInContextAndContextLabelInShell) {
  auto b = valid_bundle();
  b.scene.objects[0].category = ElementCategory::Wall;
  b.room.shell[0].category = ElementCategory::Tree;
  const auto report = validate_scene(b.scene, b.room, b.viewpoint);
  EXPECT_TRUE(report_has(report, "room-label-in-context"));
  EXPECT_TRUE(report_has(report, "context-label-in-shell"));
}

TEST(Validate, SkyMeshObjectRejected) {
  auto b = valid_bundle();
  b.scene.objects[0].category = ElementCategory::Sky;
  EXPECT_TRUE(report_has(validate_scene(b.scene, b.room, b.viewpoint), "sky-mesh-object"));
}

TEST(Validate, WindowProblems) {
  auto b = valid_bundle();
  b.room.windows.push_back({{{0, 2, 1}, {1, 2, 1}}});
  b.room.windows.push_back({{{0, 2, 1}, {1, 2, 1}, {2, 2, 1}}});
  b.room.windows.push_back({{{0, 2, 1}, {1, 2, 1}, {1, 2.5, 2}, {0, 2, 2}}});
  b.room.windows.push_back({{{0, 1, 1}, {1, 1, 1}, {1, 1, 2}, {0, 1, 2}}});
  const auto report = validate_scene(b.scene, b.room, b.viewpoint);
  EXPECT_TRUE(report_has(report, "window-too-few-vertices: window 1"));
  EXPECT_TRUE(report_has(report, "degenerate-window: window 2"));
  EXPECT_TRUE(report_has(report, "window-not-planar: window 3"));
  EXPECT_TRUE(report_has(report, "window-off-wall: window 4"));
}

TEST(Validate, ViewpointParameters) {
  auto b = valid_bundle();
  b.viewpoint.resolution = {1, 244};
  b.viewpoint.fov_deg = 180;
  b.viewpoint.aspect = {0, 2};
  b.viewpoint.direction = {0, 2, 0};
  b.viewpoint.sky_condition = 3;
  const auto report = validate_scene(b.scene, b.room, b.viewpoint);
  for (const char* code :
       {"resolution-too-small", "fov-out-of-range", "aspect-invalid", "direction-not-unit", "sky-condition-invalid"})
    EXPECT_TRUE(report_has(report, code)) << code;
}

TEST(Validate, SkyDomeMustEncloseGeometry) {
  auto b = valid_bundle();
  b.scene.objects.push_back(ground_plane(ElementCategory::Water, -5, 60000));
  EXPECT_TRUE(report_has(validate_scene(b.scene, b.room, b.viewpoint), "sky-dome-too-small"));
  finish(b);
  EXPECT_TRUE(validate_scene(b.scene, b.room, b.viewpoint).empty());
  EXPECT_GE(b.scene.sky_dome.radius, 2.0 * 60000.0);
}

TEST(SkyDome, DefaultRadiusIsAtLeastFiftyKilometres) {
  const auto b = valid_bundle();
  EXPECT_EQ(b.scene.sky_dome.center, b.viewpoint.position);
  EXPECT_DOUBLE_EQ(b.scene.sky_dome.radius, 50000.0);
}

TEST(Categories, NamesRoundTrip) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    const auto c = category_from_string(kCategoryNames[i]);
    ASSERT_TRUE(c);
    EXPECT_EQ(static_cast<std::size_t>(*c), i);
  }
  EXPECT_FALSE(category_from_string("Building"));
}

TEST(Geometry, TriangleHitDistanceAndMiss) {
  const Triangle t{{-1, 5, -1}, {1, 5, -1}, {0, 5, 1}};
  const auto hit = intersect({{0, 0, 0}, {0, 1, 0}}, t);
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(*hit, 5.0);
  EXPECT_FALSE(intersect({{0, 0, 0}, {0, -1, 0}}, t));
  EXPECT_FALSE(intersect({{3, 0, 0}, {0, 1, 0}}, t));
}

TEST(Geometry, ExitSphereFromCenter) {
  const auto t = exit_sphere({{1, 2, 3}, normalized(Vec3{1, 1, 1})}, {1, 2, 3}, 7.5);
  ASSERT_TRUE(t);
  EXPECT_NEAR(*t, 7.5, 1e-12);
}

TEST(Geometry, TriangulationCoversPolygonArea) {
  const std::vector<Vec3> poly = {{0, 0, 0}, {4, 0, 0}, {4, 3, 0}, {2, 1, 0}, {0, 3, 0}};
  double area = 0.0;
  for (const auto& t : triangulate_polygon(poly)) area += Triangle{poly[t[0]], poly[t[1]], poly[t[2]]}.area();
  EXPECT_NEAR(area, norm(polygon_vector_area(poly)), 1e-12);
}

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"

using namespace viewscope;
using namespace vs_test;

namespace {

double ratio_sum(const ViewFeatures& f) { return std::accumulate(f.ratios.begin(), f.ratios.end(), 0.0); }

CastResult cast(const SceneBundle& b, unsigned threads = default_thread_count()) {
  return cast_view(b.scene, b.room, b.viewpoint, {threads});
}

}  // namespace

TEST(RayGrid, PixelCentersAndOrientation) {
  ViewpointSpec vp;
  vp.resolution = {6, 4};
  vp.fov_deg = 90;
  const auto g = make_ray_grid(vp);
  ASSERT_EQ(g.size(), 24u);
  for (const auto& d : g.directions) EXPECT_NEAR(norm(d), 1.0, 1e-15);
  // top-left pixel center: u = -5/6, v = +3/4 * (2/3)
  const Vec3 expect = normalized(Vec3{-5.0 / 6.0, 1.0, 0.75 * 2.0 / 3.0});
  EXPECT_NEAR(norm(g.directions[0] - expect), 0.0, 1e-15);
  // row 0 looks up, last row looks down; column 0 is on the left (negative x when looking +y)
  EXPECT_GT(g.directions[0].z, 0.0);
  EXPECT_LT(g.directions[23].z, 0.0);
  EXPECT_LT(g.directions[0].x, 0.0);
  EXPECT_GT(g.directions[5].x, 0.0);
}

TEST(RayGrid, HorizontalFieldOfViewSpansFrame) {
  ViewpointSpec vp;
  vp.resolution = {1000, 2};
  vp.fov_deg = 60;
  const auto g = make_ray_grid(vp);
  // outermost pixel centers sit just inside ±30°
  const double az = std::atan2(g.directions[999].x, g.directions[999].y) * 180 / kPi;
  EXPECT_LT(az, 30.0);
  EXPECT_GT(az, 29.9);
}

TEST(RayGrid, VerticalDirectionUsesFallbackBasis) {
  const auto cam = camera_basis({0, 0, 1});
  EXPECT_NEAR(dot(cam.forward, cam.right), 0.0, 1e-15);
  EXPECT_NEAR(dot(cam.forward, cam.up), 0.0, 1e-15);
  EXPECT_NEAR(norm(cam.right), 1.0, 1e-15);
}

TEST(Stage1, FullFrustumWindowGivesRatioOne) {
  auto b = open_front_bundle();
  finish(b);
  const auto r = cast(b);
  EXPECT_EQ(r.hits.window_ratio, 1.0);
  EXPECT_EQ(r.hits.window_rays, r.grid.size());
}

TEST(Stage1, NoWindowsGivesRatioZero) {
  SceneBundle b;
  b.room = box_room();
  b.viewpoint.floor_height_override = 3.0;
  b.scene.objects.push_back({ElementCategory::Building, box({-5, 20, 0}, {5, 30, 10})});
  finish(b);
  const auto r = cast(b);
  EXPECT_EQ(r.hits.window_ratio, 0.0);
  EXPECT_EQ(r.hits.window_rays, 0u);
  const auto& f = r.features;
  EXPECT_EQ(f.wn, 0);
  EXPECT_EQ(f.was, 0.0);
  EXPECT_EQ(f.en, 0);
  for (double x : f.ratios) EXPECT_EQ(x, 0.0);
  for (const auto& d : f.distances) EXPECT_FALSE(d);
  for (double z : f.zones) EXPECT_EQ(z, 0.0);
}

TEST(Stage1, HalfWallWindowSubtendsHalfTheFrame) {
  const auto b = parse_scene(demo_scene("half_wall_window"));
  const auto r = cast(b);
  EXPECT_NEAR(r.hits.window_ratio, 0.5, 2.0 / 366);
  // the left half of every row is window, the right half wall
  for (const auto& rec : r.hits.records)
    EXPECT_EQ(rec.room == RoomOutcome::Window, rec.i < 183) << rec.i << "," << rec.j;
}

TEST(Stage1, RoomWithoutClosureRaisesEscapedRay) {
  SceneBundle b;
  b.room = box_room();
  b.room.shell.erase(b.room.shell.begin());  // drop the front wall
  b.viewpoint.floor_height_override = 3.0;
  finish(b);
  EXPECT_THROW(cast(b), EscapedRay);
}

TEST(Stage1, WindowInsetWithinOneCentimetreStillCounts) {
  auto b = open_front_bundle();
  b.room.windows[0] = front_window(-1.9, 1.9, 0.1, 2.9);
  for (auto& p : b.room.windows[0].polygon) p.y = 2.008;  // proud of the wall by 8 mm
  finish(b);
  EXPECT_EQ(cast(b).hits.window_ratio, 1.0);
}

TEST(Stage2, EmptyContextIsAllSky) {
  auto b = open_front_bundle();
  finish(b);
  const auto f = cast(b).features;
  EXPECT_EQ(f.ratio(ElementCategory::Sky), 1.0);
  EXPECT_EQ(f.en, 1);
  for (const auto& d : f.distances) EXPECT_FALSE(d);
}

TEST(Stage2, BuildingPlaneAtTenMetres) {
  auto b = open_front_bundle(5.0);
  b.scene.objects.push_back({ElementCategory::Building, quad({-500, 10, -500}, {500, 10, -500},
                                                             {500, 10, 500}, {-500, 10, 500})});
  finish(b);
  const auto f = cast(b).features;
  EXPECT_EQ(f.ratio(ElementCategory::Building), 1.0);
  ASSERT_TRUE(f.distance(ElementCategory::Building));
  EXPECT_NEAR(*f.distance(ElementCategory::Building), 10.0, 0.01);
}

TEST(Stage2, DistancesAreMeasuredFromTheViewpoint) {
  auto b = open_front_bundle(2.0);
  b.scene.objects.push_back({ElementCategory::Tree, quad({-50, 37, -50}, {50, 37, -50}, {50, 37, 50}, {-50, 37, 50})});
  finish(b);
  const auto r = cast(b);
  for (const auto& rec : r.hits.records) {
    ASSERT_EQ(rec.category, ElementCategory::Tree);
    // plane y = 37 along a unit direction d from y = 0: t = 37 / d.y
    const Vec3& d = r.grid.directions[static_cast<std::size_t>(rec.j * r.grid.width + rec.i)];
    EXPECT_NEAR(rec.distance, 37.0 / d.y, 1e-9);
  }
}

TEST(Stage2, BoxHalfWindowAnalyticFractions) {
  const auto f = cast(parse_scene(demo_scene("box_half_window"))).features;
  EXPECT_NEAR(f.ratio(ElementCategory::Building), 0.5, 0.02);
  EXPECT_NEAR(f.ratio(ElementCategory::Sky), 0.5, 0.02);
  ASSERT_TRUE(f.distance(ElementCategory::Building));
  EXPECT_NEAR(*f.distance(ElementCategory::Building), 10.0, 0.1);
  EXPECT_EQ(f.en, 2);
  EXPECT_EQ(f.wn, 1);
  EXPECT_NEAR(f.fh, 10.0, 1e-9);
  EXPECT_EQ(f.sc, 2);
}

TEST(Stage2, ThirdsWindowQuadrants) {
  const auto b = parse_scene(demo_scene("thirds_window"));
  const auto f = cast(b).features;
  // water below the horizon, tree screen upper left, sky upper right
  EXPECT_NEAR(f.ratio(ElementCategory::Water), 0.5, 0.02);
  EXPECT_NEAR(f.ratio(ElementCategory::Tree), 0.25, 0.02);
  EXPECT_NEAR(f.ratio(ElementCategory::Sky), 0.25, 0.02);
  EXPECT_EQ(f.en, 3);
  // nearest tree rays travel just over 30 m
  ASSERT_TRUE(f.distance(ElementCategory::Tree));
  EXPECT_GT(*f.distance(ElementCategory::Tree), 30.0);
  EXPECT_LT(*f.distance(ElementCategory::Tree), 30.5);
}

TEST(Stage2, RatiosSumToOneWheneverAWindowRayExists) {
  for (const char* name : {"box_half_window", "half_wall_window", "thirds_window"}) {
    const auto b = parse_scene(demo_scene(name));
    const auto f = cast(b).features;
    EXPECT_NEAR(ratio_sum(f), 1.0, 2.0 / (366.0 * 244.0)) << name;
  }
}

TEST(Stage2, ThreadCountDoesNotChangeResults) {
  const auto b = parse_scene(demo_scene("thirds_window"));
  EXPECT_EQ(cast(b, 1).features, cast(b, 7).features);
}

TEST(PerceivedDistance, HandCases) {
  EXPECT_FALSE(perceived_distance({}));
  EXPECT_EQ(*perceived_distance({7.48}), 7.48);
  EXPECT_EQ(*perceived_distance({10, 20, 30, 40, 50, 60, 70, 80, 90, 100}), 20.0);
  EXPECT_NEAR(*perceived_distance(std::vector<double>(500, 33.67)), 33.67, 1e-9);
  EXPECT_EQ(*perceived_distance({5, 1, 3}), 1.0);       // ceil(0.9) = 1
  EXPECT_EQ(*perceived_distance({4, 1, 3, 2}), 1.5);    // ceil(1.2) = 2
}

TEST(PerceivedDistance, MatchesSortOracle) {
  std::mt19937_64 gen(11);
  std::uniform_int_distribution<int> size(1, 400);
  std::uniform_real_distribution<double> dist(0.5, 5000.0);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(size(gen)));
    for (auto& x : xs) x = dist(gen);
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const auto k = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(xs.size()) - 1e-9));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
    EXPECT_EQ(*perceived_distance(xs), sum / static_cast<double>(k)) << "n = " << xs.size();
  }
}

TEST(Zones, ThirdsPartitionPixelCounts) {
  const int w = 366, h = 244;
  std::array<int, 4> count{};
  for (int j = 0; j < h; ++j)
    for (int i = 0; i < w; ++i) ++count[static_cast<std::size_t>(zone_of_pixel(i, j, w, h))];
  // rows split 81/82/81 (pixel centers), columns 122/122/122
  EXPECT_EQ(count[2], 81 * w);
  EXPECT_EQ(count[3], 81 * w);
  EXPECT_EQ(count[0], 82 * 122);
  EXPECT_EQ(count[1], 82 * 244);
}

TEST(Zones, AllWindowAndNoWindow) {
  auto b = open_front_bundle();
  finish(b);
  for (double z : cast(b).features.zones) EXPECT_EQ(z, 1.0);
  b.room.windows.clear();
  for (double z : cast(b).features.zones) EXPECT_EQ(z, 0.0);
}

TEST(Zones, MiddleCentreWindow) {
  const auto f = cast(parse_scene(demo_scene("thirds_window"))).features;
  EXPECT_NEAR(f.zones[0], 1.0, 2.0 / 366);
  EXPECT_EQ(f.zones[1], 0.0);
  EXPECT_EQ(f.zones[2], 0.0);
  EXPECT_EQ(f.zones[3], 0.0);
}

TEST(Zones, HalfWallWindowSplitsEveryZone) {
  const auto f = cast(parse_scene(demo_scene("half_wall_window"))).features;
  for (double z : f.zones) EXPECT_NEAR(z, 0.5, 2.0 / 366);
}

TEST(FloorHeight, OverrideAndAnalyticDrop) {
  ViewpointSpec vp;
  Scene s;
  vp.floor_height_override = 12.0;
  EXPECT_EQ(floor_height(vp, s), 12.0);
  vp.floor_height_override.reset();
  vp.position = {0, 0, 4.4};
  s.objects.push_back(ground_plane(ElementCategory::ArtificialGround, 0.0, 100));
  EXPECT_DOUBLE_EQ(floor_height(vp, s), 4.4);
}

TEST(FloorHeight, GroundElevationOverride) {
  ViewpointSpec vp;
  vp.position = {0, 0, 31.2};
  Scene s;
  s.ground_elevation_override = 1.2;
  EXPECT_DOUBLE_EQ(floor_height(vp, s), 30.0);
}

TEST(FloorHeight, IgnoresNonGroundCategories) {
  ViewpointSpec vp;
  vp.position = {0, 0, 20};
  Scene s;
  s.objects.push_back({ElementCategory::Building, quad({-5, -5, 5}, {5, -5, 5}, {5, 5, 5}, {-5, 5, 5})});
  s.objects.push_back(ground_plane(ElementCategory::Water, -2, 100));
  EXPECT_DOUBLE_EQ(floor_height(vp, s), 22.0);
}

TEST(FloorHeight, VoidRaisesNoGroundFound) {
  ViewpointSpec vp;
  Scene s;
  s.objects.push_back({ElementCategory::Building, box({10, 10, 0}, {20, 20, 10})});
  EXPECT_THROW(floor_height(vp, s), NoGroundFound);
}

TEST(Features, VectorRoundTripAndNames) {
  const auto f = cast(parse_scene(demo_scene("thirds_window"))).features;
  EXPECT_EQ(ViewFeatures::from_vector(f.to_vector()), f);
  EXPECT_EQ(kFeatureNames[0], "Wn");
  EXPECT_EQ(kFeatureNames[13], "Sr");
  EXPECT_EQ(kFeatureNames[22], "SC");
  EXPECT_EQ(*feature_index("FH"), 21u);
  const auto v = f.to_vector();
  EXPECT_EQ(v[14], kAbsentDistance);  // no building in view
}

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "viewscope/viewscope.hpp"

using namespace viewscope;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

fs::path source_dir() { return VIEWSCOPE_SOURCE_DIR; }

// 1. Framework scores recomputed from the printed layer weights.
void fixture_exactness(Outcome& o) {
  const auto t0 = Clock::now();
  const auto b = load_fixture_table(source_dir() / "data" / "fixtures", FixtureSet::B);
  const auto c = load_fixture_table(source_dir() / "data" / "fixtures", FixtureSet::C);
  const std::vector<double> b_expect = {3.13, 0, 3.75, 3.75, 2.5, -5};
  const std::vector<double> c_content = {4.375, 4.375, 3.125, 1.25, 2.5, 1.875, -5, -5};
  o.check(b.rows.size() == b_expect.size() && c.rows.size() == c_content.size(), "row counts");
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(b.rows.size(), b_expect.size()); ++i) {
    const double got = fixture_framework_scores(b.rows[i], FixtureSet::B).scaled_content;
    worst = std::max(worst, std::fabs(got - b_expect[i]));
    o.check(std::fabs(got - b_expect[i]) <= 0.005, "B image " + b.rows[i].image_id);
  }
  for (std::size_t i = 0; i < std::min(c.rows.size(), c_content.size()); ++i) {
    const auto s = fixture_framework_scores(c.rows[i], FixtureSet::C);
    const double printed_vqi = c.rows[i].require("framework_vqi_scaled");
    worst = std::max({worst, std::fabs(s.scaled_content - c_content[i]), std::fabs(s.scaled_vqi - printed_vqi)});
    o.check(std::fabs(s.scaled_content - c_content[i]) <= 0.005, "C content image " + c.rows[i].image_id);
    o.check(std::fabs(s.scaled_vqi - printed_vqi) <= 0.005, "C vqi image " + c.rows[i].image_id);
  }
  const double vqi4 = fixture_framework_scores(c.rows.at(0), FixtureSet::C).scaled_vqi;
  o.check(std::fabs(vqi4 + 0.483) <= 0.005, "image 4 vqi");
  const double dt = seconds_since(t0);
  o.check(dt < 1.0, "runtime");
  o.detail << "max |err| " << worst << ", image 4 vqi " << vqi4 << ", " << dt << " s";
}

// 2. Framework vs survey against predictor vs survey on the second case study.
void headline_comparison(Outcome& o) {
  const auto rep = compare_fixtures(load_fixture_table(source_dir() / "data" / "fixtures", FixtureSet::C));
  const auto* overall = rep.find(Label::Overall, Source::Survey, Source::Framework);
  if (!overall) {
    o.check(false, "no overall comparison");
    return;
  }
  o.check(std::fabs(overall->rmse - 3.78) <= 0.02, "overall rmse");
  o.detail << "overall framework rmse " << overall->rmse << ";";
  for (auto l : kLabels) {
    const auto* fw = rep.find(l, Source::Survey, Source::Framework);
    const auto* pr = rep.find(l, Source::Survey, Source::Predictor);
    if (!fw || !pr) {
      o.check(false, std::string(to_string(l)) + " missing");
      continue;
    }
    o.detail << " " << to_string(l) << " rmse fw " << fw->rmse << " / pred " << pr->rmse << " (mae " << fw->mae
             << " / " << pr->mae << ")";
    o.check(fw->rmse > pr->rmse, std::string(to_string(l)) + ": framework error does not exceed predictor error");
  }
}

// 3. Ray-cast category fractions on the authored scenes against their analytic values.
void raycaster_oracle(Outcome& o) {
  const std::map<std::string, std::map<ElementCategory, double>> analytic = {
      {"box_half_window", {{ElementCategory::Building, 0.5}, {ElementCategory::Sky, 0.5}}},
      {"half_wall_window", {{ElementCategory::ArtificialGround, 0.5}, {ElementCategory::Sky, 0.5}}},
      {"thirds_window", {{ElementCategory::Tree, 0.25}, {ElementCategory::Water, 0.5}, {ElementCategory::Sky, 0.25}}},
  };
  for (const auto& [name, expect] : analytic) {
    auto bundle = parse_scene(source_dir() / "demo" / (name + ".json"));
    for (const auto& [res, tol] : {std::pair{std::array<int, 2>{366, 244}, 0.02}, std::pair{std::array<int, 2>{732, 488}, 0.01}}) {
      bundle.viewpoint.resolution = res;
      const auto t0 = Clock::now();
      const auto r = cast_view(bundle.scene, bundle.room, bundle.viewpoint, {});
      const double dt = seconds_since(t0);
      const auto tag = name + " " + std::to_string(res[0]) + "x" + std::to_string(res[1]);
      double worst = 0.0;
      for (std::size_t c = 0; c < kViewCategoryCount; ++c) {
        const auto cat = static_cast<ElementCategory>(c);
        const auto it = expect.find(cat);
        const double want = it == expect.end() ? 0.0 : it->second;
        worst = std::max(worst, std::fabs(r.features.ratio(cat) - want));
      }
      o.check(worst <= tol, tag + " ratios");
      if (r.hits.window_ratio > 0.0) {
        const double sum = std::accumulate(r.features.ratios.begin(), r.features.ratios.end(), 0.0);
        o.check(std::fabs(sum - 1.0) <= 2.0 / (366.0 * 244.0), tag + " ratio sum");
      }
      o.check(dt < 5.0, tag + " runtime");
      o.detail << " " << tag << " max |err| " << worst << " in " << dt << " s;";
    }
  }
}

Vec3 random_point(std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(gen), u(gen), u(gen)};
}

Vec3 random_direction(std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  return normalized(Vec3{g(gen), g(gen), g(gen)});
}

// 4. BVH against brute force.
void accelerator_equivalence(Outcome& o) {
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> size(0.05, 2.0);
  std::vector<Triangle> tris;
  while (tris.size() < 10000) {
    const Vec3 c = random_point(gen, -50, 50);
    const double s = size(gen);
    Triangle t{c + random_direction(gen) * s, c + random_direction(gen) * s, c + random_direction(gen) * s};
    if (t.area() > 1e-6) tris.push_back(t);
  }
  const Bvh bvh(tris);
  std::size_t hits = 0, mismatches = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Ray r{random_point(gen, -60, 60), random_direction(gen)};
    const auto a = nearest_hit_brute_force(tris, r);
    const auto b = bvh.nearest(r);
    if (a.has_value() != b.has_value()) {
      ++mismatches;
      continue;
    }
    if (!a) continue;
    ++hits;
    if (a->primitive != b->primitive) ++mismatches;
    worst = std::max(worst, std::fabs(a->t - b->t));
  }
  o.check(mismatches == 0, "hit mismatch");
  o.check(worst <= 1e-9, "distance");
  o.detail << hits << " hits, " << mismatches << " mismatches, max |dt| " << worst << " m";
}

// 5. Closest-30% mean against a sort oracle.
void perceived_distance_oracle(Outcome& o) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<int> size(1, 400);
  std::uniform_real_distribution<double> dist(0.5, 5000.0);
  std::size_t bad = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> xs(static_cast<std::size_t>(size(gen)));
    for (auto& x : xs) x = dist(gen);
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    const auto k = static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(xs.size()) - 1e-9));
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += sorted[i];
    if (*perceived_distance(xs) != sum / static_cast<double>(k)) ++bad;
  }
  const double hand = *perceived_distance({10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  o.check(bad == 0, "oracle mismatch");
  o.check(hand == 20.0, "hand case");
  o.detail << bad << " mismatches in 1000 sets, hand case " << hand;
}

// 6. Training pipeline properties on a noiseless synthetic target.
void pipeline_properties(Outcome& o) {
  const auto t0 = Clock::now();
  TrainConfig cfg;
  const auto rows = synthetic_rows(590, 11);
  const auto ds = split_dataset(rows, derive_seed(cfg.seed, 0x5370, 0));
  o.check(ds.train.size() == 472 && ds.validation.size() == 118, "split");
  o.detail << "(d) split " << ds.train.size() << "/" << ds.validation.size() << ";";

  const auto lt = train_label(ds, cfg);
  const auto& best = lt.best();
  const double r2 = best.validation_r2.value_or(-1.0);
  o.check(r2 >= 0.95, "(a) validation r2");
  o.detail << " (a) " << to_string(best.model.family) << " r2 " << r2 << ";";

  const auto pfi = permutation_importance(best.model, ds.validation, cfg.pfi_repetitions, derive_seed(cfg.seed, 0x7066));
  std::size_t worst_signal_rank = 0;
  for (auto f : kSyntheticSignalFeatures) worst_signal_rank = std::max(worst_signal_rank, pfi.rank_of(f));
  o.check(worst_signal_rank == kSyntheticSignalFeatures.size(), "(b) signal features not on top");
  o.detail << " (b) signal ranks";
  for (auto f : kSyntheticSignalFeatures) o.detail << " " << kFeatureNames[f] << "=" << pfi.rank_of(f);
  o.detail << ";";

  const auto survey = synthetic_survey(120, 12, 13);
  const auto once = trim_responses(survey.responses);
  const auto twice = trim_responses(once.records);
  o.check(twice.records == once.records, "(c) idempotence");
  std::vector<ResponseRecord> group;
  for (double v : {1.0, 1.0, 1.0, 1.0, 10.0}) {
    ResponseRecord r{"s", "p" + std::to_string(group.size()), {}};
    r.ratings[0] = v;
    group.push_back(r);
  }
  const auto small = trim_responses(group);
  const std::size_t dropped = small.report.dropped_iqr + small.report.dropped_std;
  o.check(dropped == 1, "(c) [1,1,1,1,10]");
  o.detail << " (c) second pass drops " << (once.records.size() - twice.records.size()) << ", outlier case drops "
           << dropped << ";";

  const auto again = train_label(ds, cfg);
  bool identical = again.selected == lt.selected;
  for (std::size_t k = 0; identical && k < lt.candidates.size(); ++k)
    identical = serialize_model(lt.candidates[k].model) == serialize_model(again.candidates[k].model);
  o.check(identical, "(e) model bytes differ");
  o.detail << " (e) " << (identical ? "identical" : "different") << " model files;";

  const double dt = seconds_since(t0);
  o.check(dt < 60.0, "runtime");
  o.detail << " " << dt << " s";
}

// 7. Access score boundaries and monotonicity.
void access_boundaries(Outcome& o) {
  const std::array<AccessRow, 4> rows = {AccessRow::SkyOrGround, AccessRow::LandscapeNoNature,
                                         AccessRow::LandscapeWithNature, AccessRow::LandscapeWithSkyOrGround};
  for (auto row : rows) {
    const auto ref = access_reference(row);
    auto score = [&](double a) { return access_score({a, ref.alpha_min, ref.alpha_sat, ref.kind}); };
    const double top = ref.alpha_sat ? *ref.alpha_sat : ref.alpha_min + 1.0;
    const std::string tag = "row " + std::to_string(static_cast<int>(row));
    o.check(score(top + 5.0) == 1.0, tag + " saturated");
    if (ref.alpha_sat) o.check(score(*ref.alpha_sat) == 1.0, tag + " at saturation");
    o.check(score(ref.alpha_min) == 0.5, tag + " at minimum");
    o.check(score(ref.alpha_min - 0.1) == 0.0, tag + " below minimum");
    double prev = -1.0;
    for (int k = 0; k < 100; ++k) {
      const double s = score(0.9 * k);
      o.check(s >= prev, tag + " monotone");
      prev = s;
    }
  }
  o.detail << "4 rows, 3 branches each, 100 samples per row";
}

// 8. Error metric identities.
void metric_identities(Outcome& o) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> g;
  std::size_t bad = 0;
  for (int k = 0; k < 1000; ++k) {
    std::vector<double> p(static_cast<std::size_t>(2 + k % 40)), t(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      p[i] = g(gen);
      t[i] = g(gen);
    }
    if (root_mean_square_error(p, t) < mean_absolute_error(p, t)) ++bad;
    if (r_squared(p, t) >= 1.0) ++bad;
    if (r_squared(t, t) != 1.0) ++bad;
  }
  const std::vector<double> pred = {0, 0}, truth = {-1, 1};
  const auto m = metrics(pred, truth);
  o.check(bad == 0, "identities");
  o.check(m.r2 == 0.0 && m.mae == 1.0 && m.rmse == 1.0, "hand case");
  o.detail << bad << " violations in 1000 pairs, hand case (" << m.r2 << ", " << m.mae << ", " << m.rmse << ")";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"framework fixture exactness", fixture_exactness},
      {"headline comparison", headline_comparison},
      {"raycaster analytic oracle", raycaster_oracle},
      {"accelerator equivalence", accelerator_equivalence},
      {"perceived distance", perceived_distance_oracle},
      {"pipeline properties", pipeline_properties},
      {"access boundaries", access_boundaries},
      {"metric identities", metric_identities},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double dt = seconds_since(t0);
    std::printf("%s %zu %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), dt,
                o.detail.str().c_str());
    failed += !o.pass;
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}

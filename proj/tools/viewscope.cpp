// viewscope command-line front end: cast | framework | train | compare | pfi | sample

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "viewscope/viewscope.hpp"

#ifndef VIEWSCOPE_FIXTURE_DIR
#define VIEWSCOPE_FIXTURE_DIR "data/fixtures"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace viewscope;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitTooFew = 3;

// Input problems that are not scene/CSV/model specific.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 42;
  bool seed_given = false;
  std::string output;
  std::string format = "csv";
};

void emit(const Globals& g, const std::string& text) {
  if (g.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(g.output, std::ios::binary);
  if (!out) throw UsageError(g.output + ": cannot open for writing");
  out << text;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError(path.string() + ": cannot open for writing");
  out << text;
}

json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(path + ": not valid JSON (" + e.what() + ")");
  }
}

// ---------------------------------------------------------------------------------------------
// cast

json features_to_json(const FeatureVector& v) {
  json j = json::object();
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const bool distance = f >= 14 && f < 20;
    if (distance && v[f] < 0.0) j[std::string(kFeatureNames[f])] = nullptr;
    else j[std::string(kFeatureNames[f])] = v[f];
  }
  return j;
}

FeatureVector features_from_json(const json& j) {
  if (!j.is_object()) throw UsageError("feature record must be a JSON object");
  FeatureVector v{};
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const std::string name(kFeatureNames[f]);
    if (!j.contains(name)) throw UsageError("feature record is missing '" + name + "'");
    const auto& x = j[name];
    if (x.is_null()) v[f] = kAbsentDistance;
    else if (x.is_number()) v[f] = x.get<double>();
    else throw UsageError("feature '" + name + "' must be a number or null");
  }
  return v;
}

std::array<int, 2> parse_resolution(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw UsageError("--resolution expects WxH, got '" + s + "'");
  try {
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("--resolution expects WxH, got '" + s + "'");
  }
}

struct CastArgs {
  std::vector<std::string> scenes;
  std::string resolution;
  std::optional<double> fov;
  unsigned threads = 0;
};

int run_cast(const Globals& g, const CastArgs& a) {
  CastOptions opt;
  if (a.threads) opt.threads = a.threads;
  json records = json::array();
  std::string csv = feature_csv_header(true);
  for (const auto& path : a.scenes) {
    SceneBundle b = parse_scene_text_unvalidated(read_scene_file(path));
    if (!a.resolution.empty()) b.viewpoint.resolution = parse_resolution(a.resolution);
    if (a.fov) b.viewpoint.fov_deg = *a.fov;
    if (auto problems = validate_scene(b.scene, b.room, b.viewpoint); !problems.empty()) throw ValidationError(problems);
    const CastResult res = cast_view(b.scene, b.room, b.viewpoint, opt);
    const auto v = res.features.to_vector();
    const std::string id = fs::path(path).stem().string();
    csv += feature_csv_row(v, &id);
    const auto sub = window_subtense(b.room, b.viewpoint);
    json j = {{"scenario_id", id}, {"features", features_to_json(v)}, {"window_ratio", res.hits.window_ratio},
              {"resolution", {res.grid.width, res.grid.height}},
              {"window_subtense_deg", {{"horizontal", sub.horizontal}, {"vertical", sub.vertical}}}};
    records.push_back(std::move(j));
  }
  emit(g, g.format == "json" ? records.dump(1) + "\n" : csv);
  return 0;
}

// ---------------------------------------------------------------------------------------------
// framework

struct FrameworkArgs {
  std::string features;
  std::string layers;
  std::string scene;
};

double layer_value(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw UsageError(std::string("layers file needs numeric '") + key + "'");
  return j[key].get<double>();
}

int run_framework(const Globals& g, const FrameworkArgs& a) {
  if (a.features.empty() && a.layers.empty()) throw UsageError("framework needs --features or --layers");
  std::optional<LayerWeights> layers;
  std::optional<WindowSubtense> subtense;
  std::optional<double> v_access;

  if (!a.features.empty()) {
    json j = read_json_file(a.features);
    if (j.is_array()) {
      if (j.size() != 1) throw UsageError(a.features + ": expected exactly one feature record");
      j = j[0];
    }
    const json& fj = j.contains("features") ? j["features"] : j;
    if (a.layers.empty()) layers = derive_layers(ViewFeatures::from_vector(features_from_json(fj)));
    if (j.contains("window_subtense_deg")) {
      const auto& s = j["window_subtense_deg"];
      subtense = WindowSubtense{s.at("horizontal").get<double>(), s.at("vertical").get<double>()};
    }
  }
  if (!a.layers.empty()) {
    const json j = read_json_file(a.layers);
    if (!j.is_object()) throw UsageError(a.layers + ": expected a JSON object");
    layers = LayerWeights{layer_value(j, "L_sky"),     layer_value(j, "L_landscape"), layer_value(j, "L_ground"),
                          layer_value(j, "L_nature"),  layer_value(j, "wf_ct_dis"),   layer_value(j, "wf_movement"),
                          layer_value(j, "wf_nature")};
    if (!is_valid(*layers)) throw UsageError(a.layers + ": layer weights outside their allowed values");
    if (j.contains("v_access")) v_access = layer_value(j, "v_access");
    else if (j.contains("v_access_scaled")) v_access = unscale_bipolar(layer_value(j, "v_access_scaled"));
  }
  if (!a.scene.empty()) {
    const SceneBundle b = parse_scene(a.scene);
    if (b.room.windows.empty()) throw NoWindow();
    subtense = window_subtense(b.room, b.viewpoint);
  }

  const double content = content_score(*layers);
  std::optional<AccessAngles> angles;
  if (!v_access && subtense) {
    angles = access_angles_from_subtense(*subtense, select_access_row(*layers));
    v_access = access_score(*angles);
  }
  if (v_access && !(*v_access >= 0.0 && *v_access <= 1.0)) throw OutOfRange("v_access outside [0, 1]");

  json out = {{"L_sky", layers->l_sky},         {"L_landscape", layers->l_landscape}, {"L_ground", layers->l_ground},
              {"L_nature", layers->l_nature},   {"wf_ct_dis", layers->wf_ct_dis},     {"wf_movement", layers->wf_movement},
              {"wf_nature", layers->wf_nature}, {"v_content", content},               {"scaled_content", scale_bipolar(content)}};
  out["v_access"] = nullptr;
  out["vqi"] = nullptr;
  out["scaled_access"] = nullptr;
  out["scaled_vqi"] = nullptr;
  if (angles) out["alpha_view_deg"] = angles->alpha_view;
  if (v_access) {
    const auto s = vqi(content, *v_access);
    out["v_access"] = s.v_access;
    out["vqi"] = s.vqi;
    out["scaled_access"] = s.scaled_access;
    out["scaled_vqi"] = s.scaled_vqi;
  }
  if (g.format == "json") {
    emit(g, out.dump(1) + "\n");
    return 0;
  }
  static const char* cols[] = {"v_content", "v_access", "vqi", "scaled_content", "scaled_access", "scaled_vqi"};
  std::string head, row;
  for (const char* c : cols) {
    if (!head.empty()) {
      head += ",";
      row += ",";
    }
    head += c;
    if (!out[c].is_null()) row += format_number(out[c].get<double>());
  }
  emit(g, head + "\n" + row + "\n");
  return 0;
}

// ---------------------------------------------------------------------------------------------
// train / pfi shared input

struct DataArgs {
  std::string responses;
  std::string features;
  std::string config;
};

TrainConfig load_config(const Globals& g, const DataArgs& a) {
  TrainConfig cfg = a.config.empty() ? TrainConfig{} : load_train_config(a.config);
  if (g.seed_given) cfg.seed = g.seed;
  return cfg;
}

std::vector<ResponseRecord> load_responses(const std::string& path) {
  const std::string text = read_text_file(path);
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw TooFewRows(0, kMinSplitRows);
  auto recs = parse_responses(parse_csv(text));
  if (recs.empty()) throw TooFewRows(0, kMinSplitRows);
  return recs;
}

std::string model_file_name(Label l) { return "model_" + std::string(to_string(l)) + ".json"; }

int run_train(const Globals& g, const DataArgs& a) {
  const TrainConfig cfg = load_config(g, a);
  const auto responses = load_responses(a.responses);
  const auto features = parse_feature_table(read_csv(a.features));
  const auto res = run_training_pipeline(responses, features, cfg);

  const fs::path dir = g.output.empty() ? fs::path("models") : fs::path(g.output);
  fs::create_directories(dir);
  std::string table = "label,family,n_trees,max_depth,train_rows,validation_rows,r2,mae,rmse\n";
  json report = json::array();
  for (auto label : kLabels) {
    const auto& lt = *res.labels[static_cast<std::size_t>(label)];
    const Candidate& c = lt.best();
    write_file(dir / model_file_name(label), serialize_model(c.model));
    const std::string r2 = c.validation_r2 ? format_fixed(*c.validation_r2, 4) : std::string();
    table += std::string(to_string(label)) + "," + std::string(to_string(c.model.family)) + "," +
             std::to_string(c.model.params.n_trees) + "," + std::to_string(c.model.params.max_depth) + "," +
             std::to_string(lt.train_rows) + "," + std::to_string(lt.validation_rows) + "," + r2 + "," +
             format_fixed(c.validation_mae, 4) + "," + format_fixed(c.validation_rmse, 4) + "\n";
    json r = {{"label", std::string(to_string(label))},
              {"family", std::string(to_string(c.model.family))},
              {"n_trees", c.model.params.n_trees},
              {"max_depth", c.model.params.max_depth},
              {"train_rows", lt.train_rows},
              {"validation_rows", lt.validation_rows},
              {"mae", c.validation_mae},
              {"rmse", c.validation_rmse}};
    r["r2"] = c.validation_r2 ? json(*c.validation_r2) : json(nullptr);
    report.push_back(std::move(r));
  }
  write_file(dir / "metrics.csv", table);
  std::cerr << "trimmed " << res.trim.dropped_iqr + res.trim.dropped_std << " of " << res.trim.ratings_total
            << " ratings; " << res.scenarios << " scenarios\n";
  std::cout << (g.format == "json" ? report.dump(1) + "\n" : table);
  return 0;
}

// ---------------------------------------------------------------------------------------------
// compare

struct CompareArgs {
  std::string set = "C";
  std::vector<std::string> models;
  std::string fixtures = VIEWSCOPE_FIXTURE_DIR;
  std::string residuals;
};

ModelSet load_models(const std::vector<std::string>& paths) {
  ModelSet set;
  for (const auto& p : paths) {
    auto m = parse_model(read_text_file(p));
    const Label l = m.label;
    if (!set.emplace(l, std::move(m)).second)
      throw UsageError("two models given for label '" + std::string(to_string(l)) + "'");
  }
  return set;
}

int run_compare(const Globals& g, const CompareArgs& a) {
  const FixtureSet set = (a.set == "B" || a.set == "b") ? FixtureSet::B : FixtureSet::C;
  const auto table = load_fixture_table(a.fixtures, set);
  std::optional<ModelSet> models;
  if (!a.models.empty()) {
    models = load_models(a.models);
    for (auto l : kLabels)
      if (!models->count(l)) throw ModelMissing(l);
  }
  const auto rep = compare_fixtures(table, models ? &*models : nullptr);
  if (!a.residuals.empty()) write_file(a.residuals, report_residuals_csv(rep));
  emit(g, g.format == "json" ? report_to_json(rep).dump(1) + "\n" : report_matrix_csv(rep));
  return 0;
}

// ---------------------------------------------------------------------------------------------
// pfi

struct PfiArgs {
  DataArgs data;
  std::vector<std::string> models;
  bool all_rows = false;
};

int run_pfi(const Globals& g, const PfiArgs& a) {
  const TrainConfig cfg = load_config(g, a.data);
  const auto models = load_models(a.models);
  const auto responses = load_responses(a.data.responses);
  const auto features = parse_feature_table(read_csv(a.data.features));
  const auto datasets = prepare_datasets(responses, features, cfg);

  std::string csv = "label,rank,feature,importance\n";
  json out = json::object();
  for (const auto& [label, model] : models) {
    const auto& ds = *datasets[static_cast<std::size_t>(label)];
    std::vector<DataRow> rows = ds.validation;
    if (a.all_rows) rows.insert(rows.begin(), ds.train.begin(), ds.train.end());
    const auto rep = permutation_importance(model, rows, cfg.pfi_repetitions, derive_seed(cfg.seed, 0x7066u, static_cast<std::uint64_t>(label)));
    json ranked = json::array();
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const std::size_t f = rep.ranking[k];
      csv += std::string(to_string(label)) + "," + std::to_string(k + 1) + "," + std::string(kFeatureNames[f]) + "," +
             format_number(rep.importance[f]) + "\n";
      ranked.push_back({{"rank", k + 1}, {"feature", std::string(kFeatureNames[f])}, {"importance", rep.importance[f]}});
    }
    out[std::string(to_string(label))] = {{"baseline_r2", rep.baseline_r2}, {"rows", rows.size()}, {"ranking", ranked}};
  }
  emit(g, g.format == "json" ? out.dump(1) + "\n" : csv);
  return 0;
}

// ---------------------------------------------------------------------------------------------
// sample

struct SampleArgs {
  std::size_t scenarios = 60;
  std::size_t raters = 12;
  double noise = 0.6;
};

int run_sample(const Globals& g, const SampleArgs& a) {
  const auto survey = synthetic_survey(a.scenarios, a.raters, g.seed, a.noise);
  const fs::path dir = g.output.empty() ? fs::path(".") : fs::path(g.output);
  fs::create_directories(dir);
  write_file(dir / "responses.csv", write_responses_csv(survey.responses));
  write_file(dir / "features.csv", write_feature_table(survey.features));
  std::cerr << "wrote " << survey.responses.size() << " responses for " << a.scenarios << " scenarios to "
            << dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"viewscope: window-view features, framework scores and satisfaction models"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "master random seed")->default_val(42);
  app.add_option("-o,--output", g.output, "output file (directory for train and sample)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv", "json"}))->default_val("csv");

  CastArgs cast;
  auto* cast_cmd = app.add_subcommand("cast", "ray-cast scene files into the 23 view features");
  cast_cmd->add_option("scenes", cast.scenes, "scene JSON files")->required();
  cast_cmd->add_option("--resolution", cast.resolution, "override the ray grid, e.g. 732x488");
  cast_cmd->add_option("--fov", cast.fov, "override the horizontal field of view (degrees)");
  cast_cmd->add_option("--threads", cast.threads, "worker threads (default: hardware)");

  FrameworkArgs fw;
  auto* fw_cmd = app.add_subcommand("framework", "content/access scores and the view quality index");
  fw_cmd->add_option("--features", fw.features, "feature record (JSON written by `cast --format json`)");
  fw_cmd->add_option("--layers", fw.layers, "layer weights JSON used verbatim (L_*, wf_*, optional v_access)");
  fw_cmd->add_option("--scene", fw.scene, "scene file supplying the window geometry for view access");

  DataArgs train;
  auto* train_cmd = app.add_subcommand("train", "train the four satisfaction models");
  train_cmd->add_option("--responses", train.responses, "survey responses CSV")->required();
  train_cmd->add_option("--features", train.features, "feature CSV keyed by scenario_id")->required();
  train_cmd->add_option("--config", train.config, "TOML hyperparameter file");

  CompareArgs cmp;
  auto* cmp_cmd = app.add_subcommand("compare", "survey / framework / predictor error matrix on the case-study tables");
  cmp_cmd->add_option("--set", cmp.set, "fixture set")->check(CLI::IsMember({"B", "C", "b", "c"}));
  cmp_cmd->add_option("--model", cmp.models, "model files replacing the printed predictor columns (one per label)");
  cmp_cmd->add_option("--fixtures", cmp.fixtures, "directory holding appendix_b.csv and appendix_c.csv");
  cmp_cmd->add_option("--residuals", cmp.residuals, "also write per-image residuals CSV here");

  PfiArgs pfi;
  auto* pfi_cmd = app.add_subcommand("pfi", "permutation feature importance per label");
  pfi_cmd->add_option("--model", pfi.models, "model files")->required();
  pfi_cmd->add_option("--responses", pfi.data.responses, "survey responses CSV")->required();
  pfi_cmd->add_option("--features", pfi.data.features, "feature CSV keyed by scenario_id")->required();
  pfi_cmd->add_option("--config", pfi.data.config, "TOML hyperparameter file");
  pfi_cmd->add_flag("--all-rows", pfi.all_rows, "score on training and validation rows, not validation only");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "write a synthetic survey (responses.csv, features.csv)");
  sample_cmd->add_option("--scenarios", sample.scenarios, "number of scenarios")->default_val(60);
  sample_cmd->add_option("--raters", sample.raters, "responses per scenario")->default_val(12);
  sample_cmd->add_option("--noise", sample.noise, "rater noise standard deviation")->default_val(0.6);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*cast_cmd) return run_cast(g, cast);
    if (*fw_cmd) return run_framework(g, fw);
    if (*train_cmd) return run_train(g, train);
    if (*cmp_cmd) return run_compare(g, cmp);
    if (*pfi_cmd) return run_pfi(g, pfi);
    if (*sample_cmd) return run_sample(g, sample);
  } catch (const TooFewRows& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTooFew;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return 0;
}

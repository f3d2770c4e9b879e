#pragma once

// CART regression trees and the two ensemble families built from them: a bagged random forest
// and MART-style gradient boosting on squared loss.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "viewscope/dataset.hpp"
#include "viewscope/features.hpp"
#include "viewscope/parallel.hpp"
#include "viewscope/rng.hpp"

namespace viewscope {

class ModelFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  double value = 0.0;  // leaf output
  int left = -1;
  int right = -1;
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Binary regression tree; x[feature] <= threshold goes left. Node 0 is the root.
class RegressionTree {
 public:
  RegressionTree() = default;
  // Nodes are stored in preorder with split values zeroed, the layout a model file loads into.
  explicit RegressionTree(const std::vector<TreeNode>& nodes) {
    if (!nodes.empty()) canonical_from(nodes, 0);
  }

  double predict(const FeatureVector& x) const {
    if (nodes_.empty()) return 0.0;
    int n = 0;
    while (nodes_[static_cast<std::size_t>(n)].feature >= 0) {
      const auto& node = nodes_[static_cast<std::size_t>(n)];
      n = x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[static_cast<std::size_t>(n)].value;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const { return nodes_.empty() ? 0 : depth_from(0); }
  bool uses_feature(std::size_t f) const {
    return std::any_of(nodes_.begin(), nodes_.end(), [f](const TreeNode& n) { return n.feature == static_cast<int>(f); });
  }
  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  int canonical_from(const std::vector<TreeNode>& src, int n) {
    const auto& s = src[static_cast<std::size_t>(n)];
    const int idx = static_cast<int>(nodes_.size());
    nodes_.push_back({});
    if (s.feature < 0) {
      nodes_.back().value = s.value;
      return idx;
    }
    const int l = canonical_from(src, s.left);
    const int r = canonical_from(src, s.right);
    auto& node = nodes_[static_cast<std::size_t>(idx)];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = l;
    node.right = r;
    return idx;
  }

  std::size_t depth_from(int n) const {
    const auto& node = nodes_[static_cast<std::size_t>(n)];
    if (node.feature < 0) return 0;
    return 1 + std::max(depth_from(node.left), depth_from(node.right));
  }
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  int max_depth = 16;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // 0 = all features at every split
};

namespace detail {

class TreeBuilder {
 public:
  TreeBuilder(std::span<const FeatureVector> x, std::span<const double> y, const TreeParams& p, Rng* rng)
      : x_(x), y_(y), p_(p), rng_(rng) {}

  RegressionTree build(std::vector<std::size_t> rows) {
    nodes_.clear();
    nodes_.push_back({});
    grow(0, rows, 0);
    return RegressionTree(std::move(nodes_));
  }

 private:
  struct Split {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
  };

  void grow(std::size_t node, std::vector<std::size_t>& rows, int depth) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
    for (auto r : rows) {
      lo = std::min(lo, y_[r]);
      hi = std::max(hi, y_[r]);
      sum += y_[r];
    }
    // a pure node returns its label verbatim so memorized points reproduce exactly
    nodes_[node].value = lo == hi ? lo : sum / static_cast<double>(rows.size());

    const bool depth_ok = p_.max_depth <= 0 || depth < p_.max_depth;
    if (lo == hi || !depth_ok || rows.size() < 2 * std::max<std::size_t>(1, p_.min_samples_leaf)) return;

    const Split s = best_split(rows);
    if (s.feature < 0) return;

    std::vector<std::size_t> left, right;
    for (auto r : rows) (x_[r][static_cast<std::size_t>(s.feature)] <= s.threshold ? left : right).push_back(r);
    if (left.empty() || right.empty()) return;

    const auto l = nodes_.size();
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[node].feature = s.feature;
    nodes_[node].threshold = s.threshold;
    nodes_[node].left = static_cast<int>(l);
    nodes_[node].right = static_cast<int>(l + 1);
    rows.clear();
    rows.shrink_to_fit();
    grow(l, left, depth + 1);
    grow(l + 1, right, depth + 1);
  }

  std::vector<std::size_t> candidate_features() {
    std::vector<std::size_t> f(kFeatureCount);
    std::iota(f.begin(), f.end(), 0);
    if (p_.max_features == 0 || p_.max_features >= kFeatureCount || rng_ == nullptr) return f;
    // partial Fisher–Yates, then ascending order so ties resolve toward the lowest index
    for (std::size_t i = 0; i < p_.max_features; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng_->below(kFeatureCount - i));
      std::swap(f[i], f[j]);
    }
    f.resize(p_.max_features);
    std::sort(f.begin(), f.end());
    return f;
  }

  Split best_split(const std::vector<std::size_t>& rows) {
    const std::size_t n = rows.size();
    const std::size_t min_leaf = std::max<std::size_t>(1, p_.min_samples_leaf);
    double total = 0.0, total_sq = 0.0;
    for (auto r : rows) {
      total += y_[r];
      total_sq += y_[r] * y_[r];
    }
    const double parent_sse = total_sq - total * total / static_cast<double>(n);

    Split best;
    std::vector<std::size_t> sorted(rows);
    for (std::size_t f : candidate_features()) {
      std::stable_sort(sorted.begin(), sorted.end(),
                       [&](std::size_t a, std::size_t b) { return x_[a][f] < x_[b][f]; });
      double ls = 0.0, lsq = 0.0;
      for (std::size_t k = 0; k + 1 < n; ++k) {
        const double yk = y_[sorted[k]];
        ls += yk;
        lsq += yk * yk;
        const double xa = x_[sorted[k]][f];
        const double xb = x_[sorted[k + 1]][f];
        if (!(xa < xb)) continue;
        const std::size_t nl = k + 1, nr = n - nl;
        if (nl < min_leaf || nr < min_leaf) continue;
        const double rs = total - ls, rsq = total_sq - lsq;
        const double sse = (lsq - ls * ls / static_cast<double>(nl)) + (rsq - rs * rs / static_cast<double>(nr));
        const double gain = parent_sse - sse;
        if (gain > best.gain) {
          double thr = 0.5 * (xa + xb);
          if (!(thr >= xa && thr < xb)) thr = xa;
          best = {static_cast<int>(f), thr, gain};
        }
      }
    }
    return best;
  }

  std::span<const FeatureVector> x_;
  std::span<const double> y_;
  TreeParams p_;
  Rng* rng_;
  std::vector<TreeNode> nodes_;
};

}  // namespace detail

inline RegressionTree fit_tree(std::span<const FeatureVector> x, std::span<const double> y,
                               std::vector<std::size_t> rows, const TreeParams& p, Rng* rng = nullptr) {
  if (rows.empty()) throw std::invalid_argument("fit_tree: no rows");
  return detail::TreeBuilder(x, y, p, rng).build(std::move(rows));
}

// ---------------------------------------------------------------------------------------------
// Ensembles

enum class Family : std::uint8_t { RandomForest, GradientBoosted };

constexpr std::string_view to_string(Family f) {
  return f == Family::RandomForest ? "random_forest" : "gradient_boosted";
}
inline std::optional<Family> family_from_string(std::string_view s) {
  if (s == "random_forest") return Family::RandomForest;
  if (s == "gradient_boosted") return Family::GradientBoosted;
  return std::nullopt;
}

struct EnsembleParams {
  std::size_t n_trees = 100;
  int max_depth = 16;
  std::size_t min_samples_leaf = 2;
  std::size_t max_features = 0;
  double learning_rate = 0.2;  // boosted only
  double subsample = 1.0;      // boosted only: row fraction per round, drawn without replacement
  friend bool operator==(const EnsembleParams&, const EnsembleParams&) = default;
};

inline EnsembleParams default_forest_params() {
  return {100, 16, 2, (kFeatureCount + 2) / 3, 0.0, 1.0};
}
inline EnsembleParams default_boosted_params() { return {100, 6, 2, 0, 0.2, 1.0}; }

struct TreeEnsemble {
  Family family = Family::RandomForest;
  Label label = Label::Overall;
  EnsembleParams params;
  std::uint64_t seed = 0;
  double base_score = 0.0;  // boosted initial value; constant output when `trees` is empty
  std::vector<RegressionTree> trees;
  bool degenerate = false;  // all training labels identical

  double predict(const FeatureVector& x) const {
    if (trees.empty()) return base_score;
    if (family == Family::RandomForest) {
      double s = 0.0;
      for (const auto& t : trees) s += t.predict(x);
      return s / static_cast<double>(trees.size());
    }
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x);
    return base_score + params.learning_rate * s;
  }

  std::vector<double> predict(std::span<const DataRow> rows) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(predict(r.x));
    return out;
  }

  bool uses_feature(std::size_t f) const {
    return std::any_of(trees.begin(), trees.end(), [f](const RegressionTree& t) { return t.uses_feature(f); });
  }
  friend bool operator==(const TreeEnsemble&, const TreeEnsemble&) = default;
};

namespace detail {

inline void unpack(std::span<const DataRow> rows, std::vector<FeatureVector>& x, std::vector<double>& y) {
  x.clear();
  y.clear();
  for (const auto& r : rows) {
    x.push_back(r.x);
    y.push_back(r.y);
  }
}

inline std::optional<double> constant_label(const std::vector<double>& y) {
  if (y.empty()) throw std::invalid_argument("training set is empty");
  if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) return y.front();
  return std::nullopt;
}

}  // namespace detail

/// Bagged CART trees with per-split feature subsampling. Tree k draws from its own seed derived
/// from (seed, k), so the forest is identical regardless of thread count.
inline TreeEnsemble train_random_forest(std::span<const DataRow> train, const EnsembleParams& hp, std::uint64_t seed,
                                        Label label = Label::Overall, unsigned threads = default_thread_count()) {
  TreeEnsemble m{Family::RandomForest, label, hp, seed, 0.0, {}, false};
  std::vector<FeatureVector> x;
  std::vector<double> y;
  detail::unpack(train, x, y);
  if (auto c = detail::constant_label(y)) {
    m.base_score = *c;
    m.degenerate = true;
    return m;
  }
  m.trees.resize(hp.n_trees);
  const TreeParams tp{hp.max_depth, hp.min_samples_leaf, hp.max_features};
  parallel_for(hp.n_trees, threads, [&](std::size_t k) {
    Rng rng(derive_seed(seed, 0x7265u, k));
    std::vector<std::size_t> rows(x.size());
    for (auto& r : rows) r = static_cast<std::size_t>(rng.below(x.size()));
    m.trees[k] = fit_tree(x, y, std::move(rows), tp, &rng);
  });
  return m;
}

/// Squared-loss gradient boosting: start from the label mean and add learning-rate-scaled trees
/// fitted to the current residuals.
inline TreeEnsemble train_boosted_trees(std::span<const DataRow> train, const EnsembleParams& hp, std::uint64_t seed,
                                        Label label = Label::Overall) {
  TreeEnsemble m{Family::GradientBoosted, label, hp, seed, 0.0, {}, false};
  std::vector<FeatureVector> x;
  std::vector<double> y;
  detail::unpack(train, x, y);
  if (auto c = detail::constant_label(y)) {
    m.base_score = *c;
    m.degenerate = true;
    return m;
  }
  m.base_score = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::vector<double> pred(y.size(), m.base_score);
  std::vector<double> residual(y.size());
  const TreeParams tp{hp.max_depth, hp.min_samples_leaf, hp.max_features};
  Rng rng(derive_seed(seed, 0x6762u));
  std::vector<std::size_t> all(x.size());
  std::iota(all.begin(), all.end(), 0);
  for (std::size_t round = 0; round < hp.n_trees; ++round) {
    for (std::size_t i = 0; i < y.size(); ++i) residual[i] = y[i] - pred[i];
    std::vector<std::size_t> rows = all;
    if (hp.subsample < 1.0) {
      rng.shuffle(std::span<std::size_t>(rows));
      rows.resize(std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(hp.subsample * static_cast<double>(rows.size())))));
      std::sort(rows.begin(), rows.end());
    }
    RegressionTree t = fit_tree(x, residual, std::move(rows), tp, &rng);
    for (std::size_t i = 0; i < y.size(); ++i) pred[i] += hp.learning_rate * t.predict(x[i]);
    m.trees.push_back(std::move(t));
  }
  return m;
}

inline TreeEnsemble train_ensemble(Family family, std::span<const DataRow> train, const EnsembleParams& hp,
                                   std::uint64_t seed, Label label = Label::Overall) {
  return family == Family::RandomForest ? train_random_forest(train, hp, seed, label)
                                        : train_boosted_trees(train, hp, seed, label);
}

// ---------------------------------------------------------------------------------------------
// Serialization

namespace detail {

inline nlohmann::json tree_to_json(const RegressionTree& t, int n) {
  const auto& node = t.nodes()[static_cast<std::size_t>(n)];
  if (node.feature < 0) return {{"leaf", node.value}};
  return {{"feature", node.feature},
          {"threshold", node.threshold},
          {"left", tree_to_json(t, node.left)},
          {"right", tree_to_json(t, node.right)}};
}

inline int tree_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes) {
  if (!j.is_object()) throw ModelFormatError("tree node must be an object");
  const int idx = static_cast<int>(nodes.size());
  nodes.push_back({});
  if (auto leaf = j.find("leaf"); leaf != j.end()) {
    if (!leaf->is_number()) throw ModelFormatError("leaf must be a number");
    const double v = leaf->get<double>();
    if (!std::isfinite(v)) throw ModelFormatError("leaf value is not finite");
    nodes[static_cast<std::size_t>(idx)].value = v;
    return idx;
  }
  if (!j.contains("feature") || !j.contains("threshold") || !j.contains("left") || !j.contains("right"))
    throw ModelFormatError("split node needs feature, threshold, left, right");
  const int f = j.at("feature").get<int>();
  if (f < 0 || f >= static_cast<int>(kFeatureCount)) throw ModelFormatError("split feature index out of range");
  const double thr = j.at("threshold").get<double>();
  const int l = tree_from_json(j.at("left"), nodes);
  const int r = tree_from_json(j.at("right"), nodes);
  auto& node = nodes[static_cast<std::size_t>(idx)];
  node.feature = f;
  node.threshold = thr;
  node.left = l;
  node.right = r;
  return idx;
}

}  // namespace detail

inline nlohmann::json model_to_json(const TreeEnsemble& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) trees.push_back(detail::tree_to_json(t, 0));
  nlohmann::json names = nlohmann::json::array();
  for (auto n : kFeatureNames) names.push_back(std::string(n));
  return {{"format", "viewscope-tree-ensemble"},
          {"version", 1},
          {"family", std::string(to_string(m.family))},
          {"label", std::string(to_string(m.label))},
          {"seed", m.seed},
          {"n_features", kFeatureCount},
          {"feature_names", names},
          {"hyperparameters",
           {{"n_trees", m.params.n_trees},
            {"max_depth", m.params.max_depth},
            {"min_samples_leaf", m.params.min_samples_leaf},
            {"max_features", m.params.max_features},
            {"learning_rate", m.params.learning_rate},
            {"subsample", m.params.subsample}}},
          {"base_score", m.base_score},
          {"degenerate", m.degenerate},
          {"trees", trees}};
}

inline std::string serialize_model(const TreeEnsemble& m) { return model_to_json(m).dump(1) + "\n"; }

inline TreeEnsemble model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("n_features").get<std::size_t>() != kFeatureCount)
      throw ModelFormatError("model expects " + std::to_string(j.at("n_features").get<std::size_t>()) +
                             " features, this build uses " + std::to_string(kFeatureCount));
    TreeEnsemble m;
    const auto fam = family_from_string(j.at("family").get<std::string>());
    if (!fam) throw ModelFormatError("unknown family");
    m.family = *fam;
    const auto lab = label_from_string(j.at("label").get<std::string>());
    if (!lab) throw ModelFormatError("unknown label");
    m.label = *lab;
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& hp = j.at("hyperparameters");
    m.params.n_trees = hp.at("n_trees").get<std::size_t>();
    m.params.max_depth = hp.at("max_depth").get<int>();
    m.params.min_samples_leaf = hp.at("min_samples_leaf").get<std::size_t>();
    m.params.max_features = hp.at("max_features").get<std::size_t>();
    m.params.learning_rate = hp.at("learning_rate").get<double>();
    m.params.subsample = hp.at("subsample").get<double>();
    m.base_score = j.at("base_score").get<double>();
    m.degenerate = j.value("degenerate", false);
    for (const auto& t : j.at("trees")) {
      std::vector<TreeNode> nodes;
      detail::tree_from_json(t, nodes);
      m.trees.emplace_back(std::move(nodes));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ModelFormatError(std::string("malformed model file: ") + e.what());
  }
}

inline TreeEnsemble parse_model(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ModelFormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace viewscope

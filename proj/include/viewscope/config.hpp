#pragma once

// Flat TOML subset: [section] headers, `key = value` with numbers, booleans, quoted strings and
// single-line arrays of numbers; `#` comments. Enough for the training configuration.

#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "viewscope/csv.hpp"
#include "viewscope/predictor.hpp"

namespace viewscope {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using TomlValue = std::variant<double, bool, std::string, std::vector<double>>;
using TomlTable = std::map<std::string, TomlValue>;  // keys are "section.key"

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double toml_number(std::string_view s, std::size_t line) {
  std::string clean;
  for (char c : s)
    if (c != '_') clean += c;
  double v = 0.0;
  auto res = std::from_chars(clean.data(), clean.data() + clean.size(), v);
  if (res.ec != std::errc() || res.ptr != clean.data() + clean.size())
    throw ConfigError("line " + std::to_string(line) + ": bad value '" + std::string(s) + "'");
  return v;
}

}  // namespace detail

inline TomlTable parse_toml(std::string_view text) {
  TomlTable out;
  std::string section;
  std::size_t line_no = 0, pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    bool in_str = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        line = line.substr(0, i);
        break;
      }
    }
    line = detail::trim(line);
    if (!line.empty()) {
      if (line.front() == '[') {
        if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": unterminated section");
        section = std::string(detail::trim(line.substr(1, line.size() - 2)));
      } else {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = std::string(detail::trim(line.substr(0, eq)));
        const std::string_view val = detail::trim(line.substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        if (val == "true" || val == "false") {
          out[full] = val == "true";
        } else if (!val.empty() && val.front() == '"') {
          if (val.size() < 2 || val.back() != '"') throw ConfigError("line " + std::to_string(line_no) + ": bad string");
          out[full] = std::string(val.substr(1, val.size() - 2));
        } else if (!val.empty() && val.front() == '[') {
          if (val.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": bad array");
          std::vector<double> xs;
          std::string_view body = val.substr(1, val.size() - 2);
          while (!detail::trim(body).empty()) {
            const auto comma = body.find(',');
            const auto item = detail::trim(body.substr(0, comma));
            if (!item.empty()) xs.push_back(detail::toml_number(item, line_no));
            if (comma == std::string_view::npos) break;
            body = body.substr(comma + 1);
          }
          out[full] = std::move(xs);
        } else {
          out[full] = detail::toml_number(val, line_no);
        }
      }
    }
    if (end == text.size()) break;
  }
  return out;
}

namespace detail {

inline void read_size(const TomlTable& t, const std::string& key, std::size_t& dst) {
  auto it = t.find(key);
  if (it == t.end()) return;
  const auto* v = std::get_if<double>(&it->second);
  if (!v || *v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v)))
    throw ConfigError(key + ": expected a non-negative integer");
  dst = static_cast<std::size_t>(*v);
}

inline void read_int(const TomlTable& t, const std::string& key, int& dst) {
  auto it = t.find(key);
  if (it == t.end()) return;
  const auto* v = std::get_if<double>(&it->second);
  if (!v || *v != static_cast<double>(static_cast<int>(*v))) throw ConfigError(key + ": expected an integer");
  dst = static_cast<int>(*v);
}

inline void read_double(const TomlTable& t, const std::string& key, double& dst) {
  auto it = t.find(key);
  if (it == t.end()) return;
  const auto* v = std::get_if<double>(&it->second);
  if (!v) throw ConfigError(key + ": expected a number");
  dst = *v;
}

inline void read_depths(const TomlTable& t, const std::string& key, std::vector<int>& dst) {
  auto it = t.find(key);
  if (it == t.end()) return;
  const auto* v = std::get_if<std::vector<double>>(&it->second);
  if (!v || v->empty()) throw ConfigError(key + ": expected a non-empty array of integers");
  dst.clear();
  for (double d : *v) dst.push_back(static_cast<int>(d));
}

inline void read_params(const TomlTable& t, const std::string& sec, EnsembleParams& p) {
  read_size(t, sec + ".n_trees", p.n_trees);
  read_int(t, sec + ".max_depth", p.max_depth);
  read_size(t, sec + ".min_samples_leaf", p.min_samples_leaf);
  read_size(t, sec + ".max_features", p.max_features);
  read_double(t, sec + ".learning_rate", p.learning_rate);
  read_double(t, sec + ".subsample", p.subsample);
}

}  // namespace detail

/// Recognized keys:
///   seed
///   [trim]    iqr_factor, max_std
///   [forest]  n_trees, max_depth, min_samples_leaf, max_features, depths = [..]
///   [boosted] n_trees, max_depth, min_samples_leaf, max_features, learning_rate, subsample, depths = [..]
///   [pfi]     repetitions
inline TrainConfig train_config_from_toml(const TomlTable& t) {
  static const std::vector<std::string> known = {
      "seed", "trim.iqr_factor", "trim.max_std", "pfi.repetitions", "forest.depths", "boosted.depths"};
  static const std::vector<std::string> param_keys = {"n_trees",       "max_depth",     "min_samples_leaf",
                                                      "max_features", "learning_rate", "subsample"};
  for (const auto& [k, _] : t) {
    bool ok = std::find(known.begin(), known.end(), k) != known.end();
    for (const auto& sec : {"forest.", "boosted."})
      for (const auto& p : param_keys) ok = ok || k == std::string(sec) + p;
    if (!ok) throw ConfigError("unknown configuration key '" + k + "'");
  }
  TrainConfig c;
  if (auto it = t.find("seed"); it != t.end()) {
    const auto* v = std::get_if<double>(&it->second);
    if (!v || *v < 0) throw ConfigError("seed: expected a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*v);
  }
  detail::read_double(t, "trim.iqr_factor", c.trim.iqr_factor);
  detail::read_double(t, "trim.max_std", c.trim.max_std);
  detail::read_params(t, "forest", c.forest);
  detail::read_params(t, "boosted", c.boosted);
  detail::read_depths(t, "forest.depths", c.forest_depths);
  detail::read_depths(t, "boosted.depths", c.boosted_depths);
  detail::read_size(t, "pfi.repetitions", c.pfi_repetitions);
  return c;
}

inline TrainConfig load_train_config(const std::filesystem::path& path) {
  return train_config_from_toml(parse_toml(read_text_file(path)));
}

}  // namespace viewscope

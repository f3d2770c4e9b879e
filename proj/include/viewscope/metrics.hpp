#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace viewscope {

class ZeroVariance : public std::domain_error {
 public:
  ZeroVariance() : std::domain_error("R² undefined: truth has zero variance") {}
};

struct Metrics {
  double r2 = 0.0;
  double mae = 0.0;
  double rmse = 0.0;
};

namespace detail {
inline void check_lengths(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size())
    throw std::invalid_argument("prediction/truth length mismatch: " + std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()));
  if (pred.empty()) throw std::invalid_argument("metrics of an empty vector");
}
}  // namespace detail

inline double mean_absolute_error(std::span<const double> pred, std::span<const double> truth) {
  detail::check_lengths(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

inline double root_mean_square_error(std::span<const double> pred, std::span<const double> truth) {
  detail::check_lengths(pred, truth);
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(pred.size()));
}

/// 1 − SSE/SST. Throws ZeroVariance for constant truth.
inline double r_squared(std::span<const double> pred, std::span<const double> truth) {
  detail::check_lengths(pred, truth);
  if (truth.size() < 2) throw std::invalid_argument("R² needs at least two points");
  double mean = 0.0;
  for (double t : truth) mean += t;
  mean /= static_cast<double>(truth.size());
  double sse = 0.0, sst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    sse += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    sst += (truth[i] - mean) * (truth[i] - mean);
  }
  if (sst == 0.0) throw ZeroVariance();
  return 1.0 - sse / sst;
}

inline Metrics metrics(std::span<const double> pred, std::span<const double> truth) {
  return {r_squared(pred, truth), mean_absolute_error(pred, truth), root_mean_square_error(pred, truth)};
}

}  // namespace viewscope

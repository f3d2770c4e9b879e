#pragma once

// Bounding-volume hierarchy over a flat triangle list. Queries return the nearest hit with the
// same (distance, lowest index) ordering as a linear scan over every triangle.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "viewscope/geometry.hpp"

namespace viewscope {

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  std::uint32_t primitive = std::numeric_limits<std::uint32_t>::max();
  friend bool operator==(const Hit&, const Hit&) = default;
};

/// Reference query: every triangle, strict `<` so the lowest index wins ties.
inline std::optional<Hit> nearest_hit_brute_force(std::span<const Triangle> tris, const Ray& ray,
                                                  double t_min = 1e-9,
                                                  double t_max = std::numeric_limits<double>::infinity()) {
  std::optional<Hit> best;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const auto t = intersect(ray, tris[i], t_min, t_max);
    if (t && (!best || *t < best->t)) best = Hit{*t, static_cast<std::uint32_t>(i)};
  }
  return best;
}

class Bvh {
 public:
  static constexpr std::size_t kLeafSize = 4;
  static constexpr int kBins = 16;

  Bvh() = default;

  explicit Bvh(std::vector<Triangle> triangles) : tris_(std::move(triangles)) {
    order_.resize(tris_.size());
    std::iota(order_.begin(), order_.end(), 0u);
    if (tris_.empty()) return;
    centroids_.reserve(tris_.size());
    for (const auto& t : tris_) centroids_.push_back(t.centroid());
    nodes_.reserve(2 * tris_.size());
    nodes_.push_back({});
    build(0, 0, static_cast<std::uint32_t>(tris_.size()));
    centroids_.clear();
    centroids_.shrink_to_fit();
  }

  std::size_t size() const { return tris_.size(); }
  std::size_t node_count() const { return nodes_.size(); }
  const Triangle& triangle(std::size_t i) const { return tris_[i]; }
  std::span<const Triangle> triangles() const { return tris_; }

  std::optional<Hit> nearest(const Ray& ray, double t_min = 1e-9,
                             double t_max = std::numeric_limits<double>::infinity()) const {
    if (nodes_.empty()) return std::nullopt;
    const Vec3 inv{1.0 / ray.direction.x, 1.0 / ray.direction.y, 1.0 / ray.direction.z};
    Hit best{t_max, std::numeric_limits<std::uint32_t>::max()};
    bool found = false;

    std::vector<std::uint32_t> stack;
    stack.reserve(64);
    stack.push_back(0);
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!slab(node.box, ray, inv, t_min, best.t)) continue;
      if (node.count > 0) {
        for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
          const std::uint32_t prim = order_[k];
          // t_max is inclusive of the current best so equal-distance hits can win on index
          const double bound = found ? std::nextafter(best.t, std::numeric_limits<double>::infinity()) : t_max;
          const auto t = intersect(ray, tris_[prim], t_min, bound);
          if (!t) continue;
          if (*t < best.t || (*t == best.t && prim < best.primitive)) {
            best = {*t, prim};
            found = true;
          }
        }
      } else {
        const std::uint32_t l = node.first;
        const std::uint32_t r = node.first + 1;
        const double dl = entry(nodes_[l].box, ray, inv);
        const double dr = entry(nodes_[r].box, ray, inv);
        if (dl <= dr) {
          stack.push_back(r);
          stack.push_back(l);
        } else {
          stack.push_back(l);
          stack.push_back(r);
        }
      }
    }
    if (!found) return std::nullopt;
    return best;
  }

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // leaf: first index into order_; interior: left child (right = left + 1)
    std::uint32_t count = 0;  // 0 for interior nodes
  };

  static constexpr double kRobust = 1.0 + 2.0 * (3.0 * std::numeric_limits<double>::epsilon()) /
                                              (1.0 - 3.0 * std::numeric_limits<double>::epsilon());

  static bool slab(const Aabb& b, const Ray& ray, Vec3 inv, double t_min, double t_max) {
    double lo = t_min;
    double hi = t_max;
    for (std::size_t a = 0; a < 3; ++a) {
      double t0 = (b.lo[a] - ray.origin[a]) * inv[a];
      double t1 = (b.hi[a] - ray.origin[a]) * inv[a];
      if (t0 > t1) std::swap(t0, t1);
      t1 *= kRobust;
      // NaN (0 * inf) leaves the interval unconstrained on that axis
      lo = std::fmax(lo, t0);
      hi = std::fmin(hi, t1);
    }
    return lo <= hi;
  }

  static double entry(const Aabb& b, const Ray& ray, Vec3 inv) {
    double lo = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
      double t0 = (b.lo[a] - ray.origin[a]) * inv[a];
      double t1 = (b.hi[a] - ray.origin[a]) * inv[a];
      lo = std::fmax(lo, std::fmin(t0, t1));
    }
    return lo;
  }

  static Aabb padded(Aabb b) {
    const double scale = std::max({std::abs(b.lo.x), std::abs(b.lo.y), std::abs(b.lo.z), std::abs(b.hi.x),
                                   std::abs(b.hi.y), std::abs(b.hi.z), 1.0});
    const double pad = 1e-9 * scale;
    b.lo = b.lo - Vec3{pad, pad, pad};
    b.hi = b.hi + Vec3{pad, pad, pad};
    return b;
  }

  void build(std::uint32_t node_index, std::uint32_t first, std::uint32_t count) {
    Aabb box, cbox;
    for (std::uint32_t k = first; k < first + count; ++k) {
      box.grow(tris_[order_[k]]);
      cbox.grow(centroids_[order_[k]]);
    }
    nodes_[node_index].box = padded(box);

    std::uint32_t split = 0;
    if (count > kLeafSize) split = partition_sah(first, count, cbox, box);
    if (split == 0) {
      nodes_[node_index].first = first;
      nodes_[node_index].count = count;
      return;
    }
    const auto left = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back({});
    nodes_.push_back({});
    nodes_[node_index].first = left;
    nodes_[node_index].count = 0;
    build(left, first, split);
    build(left + 1, first + split, count - split);
  }

  // Returns the number of primitives placed on the left, or 0 to make a leaf.
  std::uint32_t partition_sah(std::uint32_t first, std::uint32_t count, const Aabb& cbox, const Aabb& box) {
    const Vec3 ext = cbox.extent();
    std::size_t axis = 0;
    if (ext.y > ext[axis]) axis = 1;
    if (ext.z > ext[axis]) axis = 2;
    auto begin = order_.begin() + first;
    auto end = begin + count;

    if (!(ext[axis] > 0.0)) {
      // coincident centroids: median split by index keeps the tree shallow
      std::sort(begin, end);
      return count / 2;
    }

    struct Bin {
      Aabb box;
      std::uint32_t n = 0;
    };
    std::array<Bin, kBins> bins{};
    const double lo = cbox.lo[axis];
    const double scale = kBins / ext[axis];
    auto bin_of = [&](std::uint32_t prim) {
      const int b = static_cast<int>((centroids_[prim][axis] - lo) * scale);
      return std::clamp(b, 0, kBins - 1);
    };
    for (auto it = begin; it != end; ++it) {
      auto& b = bins[static_cast<std::size_t>(bin_of(*it))];
      b.box.grow(tris_[*it]);
      ++b.n;
    }

    double best_cost = std::numeric_limits<double>::infinity();
    int best_split = -1;
    for (int s = 1; s < kBins; ++s) {
      Aabb lb, rb;
      std::uint32_t ln = 0, rn = 0;
      for (int i = 0; i < s; ++i) {
        lb.grow(bins[static_cast<std::size_t>(i)].box);
        ln += bins[static_cast<std::size_t>(i)].n;
      }
      for (int i = s; i < kBins; ++i) {
        rb.grow(bins[static_cast<std::size_t>(i)].box);
        rn += bins[static_cast<std::size_t>(i)].n;
      }
      if (ln == 0 || rn == 0) continue;
      const double cost = lb.surface_area() * ln + rb.surface_area() * rn;
      if (cost < best_cost) {
        best_cost = cost;
        best_split = s;
      }
    }
    const double leaf_cost = box.surface_area() * count;
    if (best_split < 0 || (count <= 2 * kLeafSize && best_cost >= leaf_cost)) {
      if (best_split < 0) {
        std::sort(begin, end, [&](std::uint32_t a, std::uint32_t b) {
          return centroids_[a][axis] < centroids_[b][axis] || (centroids_[a][axis] == centroids_[b][axis] && a < b);
        });
        return count / 2;
      }
      return 0;
    }
    auto mid = std::stable_partition(begin, end, [&](std::uint32_t p) { return bin_of(p) < best_split; });
    return static_cast<std::uint32_t>(mid - begin);
  }

  std::vector<Triangle> tris_;
  std::vector<std::uint32_t> order_;
  std::vector<Vec3> centroids_;
  std::vector<Node> nodes_;
};

}  // namespace viewscope

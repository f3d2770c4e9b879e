#pragma once

// Small vector/ray/triangle toolkit shared by the scene model and the ray caster.
// Everything is double precision; world frame is meters, z-up, right-handed.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace viewscope {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr Vec3 operator*(double s, Vec3 a) { return a * s; }
constexpr Vec3 operator/(Vec3 a, double s) { return {a.x / s, a.y / s, a.z / s}; }

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
inline Vec3 normalized(Vec3 a) { return a / norm(a); }

inline Vec3 min_of(Vec3 a, Vec3 b) { return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)}; }
inline Vec3 max_of(Vec3 a, Vec3 b) { return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}; }

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length
};

struct Triangle {
  Vec3 a, b, c;

  Vec3 normal() const { return cross(b - a, c - a); }  // not normalized
  double area() const { return 0.5 * norm(normal()); }
  Vec3 centroid() const { return (a + b + c) / 3.0; }
};

struct Aabb {
  Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity()};
  Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          -std::numeric_limits<double>::infinity()};

  void grow(Vec3 p) {
    lo = min_of(lo, p);
    hi = max_of(hi, p);
  }
  void grow(const Triangle& t) {
    grow(t.a);
    grow(t.b);
    grow(t.c);
  }
  void grow(const Aabb& o) {
    lo = min_of(lo, o.lo);
    hi = max_of(hi, o.hi);
  }
  bool empty() const { return lo.x > hi.x; }
  Vec3 extent() const { return hi - lo; }
  double surface_area() const {
    if (empty()) return 0.0;
    const Vec3 e = extent();
    return 2.0 * (e.x * e.y + e.y * e.z + e.z * e.x);
  }
};

/// Möller–Trumbore. Returns the ray parameter of the hit when it lies in (t_min, t_max).
/// Edge hits are inclusive so that rays through a shared edge are never lost.
inline std::optional<double> intersect(const Ray& ray, const Triangle& tri, double t_min = 1e-9,
                                       double t_max = std::numeric_limits<double>::infinity()) {
  const Vec3 e1 = tri.b - tri.a;
  const Vec3 e2 = tri.c - tri.a;
  const Vec3 p = cross(ray.direction, e2);
  const double det = dot(e1, p);
  if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
  const double inv_det = 1.0 / det;
  const Vec3 s = ray.origin - tri.a;
  const double u = dot(s, p) * inv_det;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(ray.direction, q) * inv_det;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(e2, q) * inv_det;
  if (t <= t_min || t >= t_max) return std::nullopt;
  return t;
}

/// Far intersection of a ray starting inside a sphere.
inline std::optional<double> exit_sphere(const Ray& ray, Vec3 center, double radius) {
  const Vec3 oc = ray.origin - center;
  const double b = dot(oc, ray.direction);
  const double c = dot(oc, oc) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double t = -b + std::sqrt(disc);
  if (t <= 0.0) return std::nullopt;
  return t;
}

inline double point_segment_distance(Vec3 p, Vec3 a, Vec3 b) {
  const Vec3 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

inline double point_triangle_distance(Vec3 p, const Triangle& tri) {
  const Vec3 n = tri.normal();
  const double n_len = norm(n);
  if (n_len > 0.0) {
    const Vec3 un = n / n_len;
    const double signed_dist = dot(p - tri.a, un);
    const Vec3 proj = p - un * signed_dist;
    // barycentric inside test on the projected point
    const bool s0 = dot(cross(tri.b - tri.a, proj - tri.a), n) >= 0.0;
    const bool s1 = dot(cross(tri.c - tri.b, proj - tri.b), n) >= 0.0;
    const bool s2 = dot(cross(tri.a - tri.c, proj - tri.c), n) >= 0.0;
    if (s0 && s1 && s2) return std::abs(signed_dist);
  }
  return std::min({point_segment_distance(p, tri.a, tri.b), point_segment_distance(p, tri.b, tri.c),
                   point_segment_distance(p, tri.c, tri.a)});
}

/// Vector area of a closed polygon (Newell); its length is the polygon area for planar input.
inline Vec3 polygon_vector_area(std::span<const Vec3> poly) {
  Vec3 acc{};
  for (std::size_t i = 0; i < poly.size(); ++i) {
    acc = acc + cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return acc * 0.5;
}

/// Ear-clipping triangulation of a simple planar polygon. Returns index triples.
inline std::vector<std::array<std::size_t, 3>> triangulate_polygon(std::span<const Vec3> poly) {
  std::vector<std::array<std::size_t, 3>> out;
  const std::size_t n = poly.size();
  if (n < 3) return out;
  const Vec3 normal = polygon_vector_area(poly);

  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;

  auto convex = [&](std::size_t i0, std::size_t i1, std::size_t i2) {
    return dot(cross(poly[i1] - poly[i0], poly[i2] - poly[i1]), normal) > 0.0;
  };
  auto inside = [&](Vec3 p, std::size_t i0, std::size_t i1, std::size_t i2) {
    const Vec3 a = poly[i0], b = poly[i1], c = poly[i2];
    return dot(cross(b - a, p - a), normal) >= 0.0 && dot(cross(c - b, p - b), normal) >= 0.0 &&
           dot(cross(a - c, p - c), normal) >= 0.0;
  };

  std::size_t guard = 0;
  while (idx.size() > 3 && guard < n * n) {
    ++guard;
    bool clipped = false;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const std::size_t i0 = idx[(k + idx.size() - 1) % idx.size()];
      const std::size_t i1 = idx[k];
      const std::size_t i2 = idx[(k + 1) % idx.size()];
      if (!convex(i0, i1, i2)) continue;
      bool blocked = false;
      for (std::size_t other : idx) {
        if (other == i0 || other == i1 || other == i2) continue;
        if (inside(poly[other], i0, i1, i2)) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      out.push_back({i0, i1, i2});
      idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
      clipped = true;
      break;
    }
    if (!clipped) break;  // degenerate input; fall through to a fan of what is left
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) out.push_back({idx[0], idx[k], idx[k + 1]});
  return out;
}

}  // namespace viewscope

#pragma once

#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kite/scalar.hpp"

namespace kite {

// Absolute tolerance for float-mode point classification; domains here have
// unit scale.
inline constexpr double kGeomTol = 1e-12;
// Clips whose area falls below this are reported as empty.
inline constexpr double kDegenerateArea = 1e-18;

template <class S>
struct Vec2 {
  S x{};
  S y{};

  Vec2() = default;
  Vec2(S xx, S yy) : x(std::move(xx)), y(std::move(yy)) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(const S& k) const { return {x * k, y * k}; }
  Vec2 operator-() const { return {-x, -y}; }
  bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

  S dot(const Vec2& o) const { return x * o.x + y * o.y; }
  // z-component of the cross product.
  S cross(const Vec2& o) const { return x * o.y - y * o.x; }
  S norm2() const { return x * x + y * y; }
};

template <class S>
using Point2 = Vec2<S>;

using Vec2d = Vec2<double>;
using Vec2r = Vec2<Rat>;

inline double norm(const Vec2d& v) { return std::sqrt(v.norm2()); }
inline double distance(const Vec2d& a, const Vec2d& b) { return norm(a - b); }

template <class S>
Vec2<double> to_double(const Vec2<S>& v) {
  return {to_double(v.x), to_double(v.y)};
}

// Row-major 2x2 matrix.
template <class S>
struct Mat2 {
  S a11{}, a12{}, a21{}, a22{};

  Vec2<S> operator*(const Vec2<S>& v) const {
    return {a11 * v.x + a12 * v.y, a21 * v.x + a22 * v.y};
  }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  S det() const { return a11 * a22 - a12 * a21; }
  Mat2 transpose() const { return {a11, a21, a12, a22}; }

  static Mat2 identity() { return {S(1), S(0), S(0), S(1)}; }
};

using Mat2d = Mat2<double>;
using Mat2r = Mat2<Rat>;

// Closed half-plane {p : <normal, p> <= offset}.
template <class S>
struct HalfPlane {
  Vec2<S> normal;
  S offset{};

  HalfPlane() = default;
  HalfPlane(Vec2<S> n, S c) : normal(std::move(n)), offset(std::move(c)) {
    if (normal.x == S(0) && normal.y == S(0))
      throw std::invalid_argument("half-plane with zero normal");
  }

  S value(const Vec2<S>& p) const { return normal.dot(p) - offset; }

  HalfPlane complement() const { return HalfPlane(-normal, -offset); }

  bool contains(const Vec2<S>& p) const {
    if constexpr (ScalarTraits<S>::exact) {
      return value(p) <= S(0);
    } else {
      return value(p) <= kGeomTol;
    }
  }
};

using HalfPlaned = HalfPlane<double>;
using HalfPlaner = HalfPlane<Rat>;

// Convex polygon, vertices in counterclockwise order, strictly convex after
// construction-time cleanup, at least 3 vertices.
template <class S>
class ConvexPolygon {
 public:
  explicit ConvexPolygon(std::vector<Vec2<S>> vertices)
      : vertices_(cleanup(std::move(vertices))) {
    validate();
  }
  ConvexPolygon(std::initializer_list<Vec2<S>> vs)
      : ConvexPolygon(std::vector<Vec2<S>>(vs)) {}

  const std::vector<Vec2<S>>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  const Vec2<S>& operator[](std::size_t i) const { return vertices_[i]; }

  S area() const {
    S twice = ScalarTraits<S>::zero();
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const auto& a = vertices_[i];
      const auto& b = vertices_[(i + 1) % vertices_.size()];
      twice += a.cross(b);
    }
    return twice / S(2);
  }

  bool contains(const Vec2<S>& p) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const auto& a = vertices_[i];
      const auto& b = vertices_[(i + 1) % vertices_.size()];
      const S side = (b - a).cross(p - a);
      if constexpr (ScalarTraits<S>::exact) {
        if (side < S(0)) return false;
      } else {
        // Normalize by edge length so the tolerance is a distance.
        const double len = norm(to_double(b - a));
        if (to_double(side) < -kGeomTol * (len > 1.0 ? len : 1.0)) return false;
      }
    }
    return true;
  }

 private:
  static std::vector<Vec2<S>> cleanup(std::vector<Vec2<S>> vs) {
    // Drop consecutive duplicates, then collinear middle vertices.
    auto nearly_equal = [](const Vec2<S>& a, const Vec2<S>& b) {
      if constexpr (ScalarTraits<S>::exact) return a == b;
      else return to_double((a - b).norm2()) < 1e-28;
    };
    std::vector<Vec2<S>> dedup;
    for (const auto& v : vs) {
      if (dedup.empty() || !nearly_equal(dedup.back(), v)) dedup.push_back(v);
    }
    while (dedup.size() > 1 && nearly_equal(dedup.front(), dedup.back()))
      dedup.pop_back();

    if (dedup.size() < 3) return dedup;
    std::vector<Vec2<S>> out;
    const std::size_t n = dedup.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& prev = dedup[(i + n - 1) % n];
      const auto& cur = dedup[i];
      const auto& next = dedup[(i + 1) % n];
      const S turn = (cur - prev).cross(next - cur);
      bool collinear;
      if constexpr (ScalarTraits<S>::exact) collinear = (turn == S(0));
      else collinear = std::abs(to_double(turn)) < 1e-24;
      if (!collinear) out.push_back(cur);
    }
    return out;
  }

  void validate() const {
    if (vertices_.size() < 3)
      throw std::invalid_argument("convex polygon needs at least 3 vertices");
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& prev = vertices_[(i + n - 1) % n];
      const auto& cur = vertices_[i];
      const auto& next = vertices_[(i + 1) % n];
      const S turn = (cur - prev).cross(next - cur);
      bool ok;
      if constexpr (ScalarTraits<S>::exact) ok = turn > S(0);
      else ok = to_double(turn) > 0.0;
      if (!ok)
        throw std::invalid_argument(
            "polygon vertices not in strictly convex counterclockwise order");
    }
  }

  std::vector<Vec2<S>> vertices_;
};

using ConvexPolygond = ConvexPolygon<double>;
using ConvexPolygonr = ConvexPolygon<Rat>;

template <class S>
S polygon_area(const ConvexPolygon<S>& poly) {
  return poly.area();
}

template <class S>
bool contains(const ConvexPolygon<S>& poly, const Vec2<S>& p) {
  return poly.contains(p);
}

// Intersection of a convex polygon with a half-plane. Returns nullopt when
// the intersection has (near-)zero area.
template <class S>
std::optional<ConvexPolygon<S>> clip_halfplane(const ConvexPolygon<S>& poly,
                                               const HalfPlane<S>& h) {
  const auto& vs = poly.vertices();
  const std::size_t n = vs.size();
  std::vector<S> vals(n);
  for (std::size_t i = 0; i < n; ++i) vals[i] = h.value(vs[i]);

  std::vector<Vec2<S>> out;
  out.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool in_i = vals[i] <= S(0);
    const bool in_j = vals[j] <= S(0);
    if (in_i) out.push_back(vs[i]);
    if (in_i != in_j) {
      // vals[i] and vals[j] have opposite strict signs or one is zero;
      // if one is exactly zero the vertex itself is the crossing point.
      if (vals[i] == S(0)) continue;      // already emitted
      if (vals[j] == S(0)) continue;      // will be emitted as vs[j]
      const S t = vals[i] / (vals[i] - vals[j]);
      out.push_back(vs[i] + (vs[j] - vs[i]) * t);
    }
  }
  if (out.size() < 3) return std::nullopt;
  ConvexPolygon<S> result(std::move(out));
  if constexpr (ScalarTraits<S>::exact) {
    if (result.area() == S(0)) return std::nullopt;
  } else {
    if (to_double(result.area()) < kDegenerateArea) return std::nullopt;
  }
  return result;
}

// Piecewise-linear (affine) map: the first branch whose region contains the
// point applies. Regions are intersections of closed half-planes; branches
// must agree where regions overlap for the map to be single-valued.
template <class S>
struct PiecewiseLinearMap {
  struct Branch {
    std::vector<HalfPlane<S>> region;  // empty region == everywhere
    Mat2<S> matrix;
    Vec2<S> offset;

    bool applies(const Vec2<S>& p) const {
      for (const auto& h : region)
        if (!h.contains(p)) return false;
      return true;
    }
    Vec2<S> eval(const Vec2<S>& p) const { return matrix * p + offset; }
  };

  std::vector<Branch> branches;

  Vec2<S> operator()(const Vec2<S>& p) const { return apply(p); }

  Vec2<S> apply(const Vec2<S>& p) const {
    for (const auto& b : branches)
      if (b.applies(p)) return b.eval(p);
    throw std::domain_error("point outside all branch regions");
  }

  // All branch values at p; used to test agreement on region boundaries.
  std::vector<Vec2<S>> applicable_values(const Vec2<S>& p) const {
    std::vector<Vec2<S>> out;
    for (const auto& b : branches)
      if (b.applies(p)) out.push_back(b.eval(p));
    return out;
  }
};

using PiecewiseLinearMapd = PiecewiseLinearMap<double>;
using PiecewiseLinearMapr = PiecewiseLinearMap<Rat>;

template <class S>
Vec2<S> apply_map(const PiecewiseLinearMap<S>& m, const Vec2<S>& p) {
  return m.apply(p);
}

// --- double-only helpers -------------------------------------------------

Vec2d polygon_centroid(const ConvexPolygond& poly);

// Integral of |x - q|^2 over the polygon.
double polygon_second_moment(const ConvexPolygond& poly, const Vec2d& q);

double segment_distance(const Vec2d& p, const Vec2d& a, const Vec2d& b);

double polygon_boundary_distance(const ConvexPolygond& poly, const Vec2d& p);

// Uniform sample by fan triangulation; deterministic given the rng.
class Rng;
Vec2d sample_in_polygon(const ConvexPolygond& poly, Rng& rng);

}  // namespace kite

#include "kite/geometry.hpp"

#include <cmath>

#include "kite/rng.hpp"

namespace kite {

Vec2d polygon_centroid(const ConvexPolygond& poly) {
  const auto& vs = poly.vertices();
  double twice_area = 0.0;
  Vec2d c{0.0, 0.0};
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto& a = vs[i];
    const auto& b = vs[(i + 1) % vs.size()];
    const double w = a.cross(b);
    twice_area += w;
    c.x += (a.x + b.x) * w;
    c.y += (a.y + b.y) * w;
  }
  return {c.x / (3.0 * twice_area), c.y / (3.0 * twice_area)};
}

double polygon_second_moment(const ConvexPolygond& poly, const Vec2d& q) {
  // Fan from the first vertex; per-triangle closed form
  //   int_T |x-q|^2 dA = (A/6) (sum |d_i|^2 + sum_{i<j} <d_i, d_j>).
  const auto& vs = poly.vertices();
  double total = 0.0;
  const Vec2d d0 = vs[0] - q;
  for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
    const Vec2d d1 = vs[i] - q;
    const Vec2d d2 = vs[i + 1] - q;
    const double a = 0.5 * (vs[i] - vs[0]).cross(vs[i + 1] - vs[0]);
    total += a / 6.0 *
             (d0.norm2() + d1.norm2() + d2.norm2() + d0.dot(d1) + d1.dot(d2) +
              d0.dot(d2));
  }
  return total;
}

double segment_distance(const Vec2d& p, const Vec2d& a, const Vec2d& b) {
  const Vec2d ab = b - a;
  const double len2 = ab.norm2();
  if (len2 == 0.0) return distance(p, a);
  double t = (p - a).dot(ab) / len2;
  t = std::max(0.0, std::min(1.0, t));
  return distance(p, a + ab * t);
}

double polygon_boundary_distance(const ConvexPolygond& poly, const Vec2d& p) {
  const auto& vs = poly.vertices();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < vs.size(); ++i) {
    best = std::min(best,
                    segment_distance(p, vs[i], vs[(i + 1) % vs.size()]));
  }
  return best;
}

Vec2d sample_in_polygon(const ConvexPolygond& poly, Rng& rng) {
  const auto& vs = poly.vertices();
  // Pick a fan triangle proportional to area, then a uniform point inside.
  std::vector<double> cum;
  cum.reserve(vs.size() - 2);
  double total = 0.0;
  for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
    total += 0.5 * (vs[i] - vs[0]).cross(vs[i + 1] - vs[0]);
    cum.push_back(total);
  }
  const double pick = rng.uniform() * total;
  std::size_t tri = 0;
  while (tri + 1 < cum.size() && cum[tri] < pick) ++tri;
  double u = rng.uniform(), v = rng.uniform();
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  const Vec2d& a = vs[0];
  const Vec2d& b = vs[tri + 1];
  const Vec2d& c = vs[tri + 2];
  return a + (b - a) * u + (c - a) * v;
}

}  // namespace kite

#pragma once

#include <array>
#include <utility>

#include "kite/geometry.hpp"

// Planar domains of the kite transport problem and their piecewise-linear
// symmetries. "Shifted" places the singular corner at the origin and rescales
// the target to equal area; "unshifted" keeps the raw chart coordinates.
namespace kite::domains {

template <class S>
S frac(long long num, long long den) {
  return S(num) / S(den);
}

// Source kite Omega = Hull{(0,0),(1/3,0),(1,1),(0,1/3)}, area 1/3.
template <class S>
ConvexPolygon<S> omega_unshifted() {
  return ConvexPolygon<S>{{S(0), S(0)},
                          {frac<S>(1, 3), S(0)},
                          {S(1), S(1)},
                          {S(0), frac<S>(1, 3)}};
}

// Shifted by (-1/2,-1/2): singular point at the origin.
template <class S>
ConvexPolygon<S> omega_shifted() {
  return ConvexPolygon<S>{{frac<S>(-1, 2), frac<S>(-1, 2)},
                          {frac<S>(-1, 6), frac<S>(-1, 2)},
                          {frac<S>(1, 2), frac<S>(1, 2)},
                          {frac<S>(-1, 2), frac<S>(-1, 6)}};
}

// Target Theta is a union of two convex quads (it is not convex itself).
// Unshifted: area 16/3 = 16 * area(Omega).
template <class S>
std::array<ConvexPolygon<S>, 2> theta_unshifted() {
  ConvexPolygon<S> lower{{frac<S>(4, 3), frac<S>(4, 3)},
                         {S(4), S(0)},
                         {frac<S>(16, 3), S(0)},
                         {S(2), S(2)}};
  ConvexPolygon<S> upper{{frac<S>(4, 3), frac<S>(4, 3)},
                         {S(2), S(2)},
                         {S(0), frac<S>(16, 3)},
                         {S(0), S(4)}};
  return {std::move(lower), std::move(upper)};
}

// Shifted variant: rescaled by 1/4 (equal area to Omega), then shifted by
// (-1/2,-1/2).
template <class S>
std::array<ConvexPolygon<S>, 2> theta_shifted() {
  ConvexPolygon<S> lower{{frac<S>(-1, 6), frac<S>(-1, 6)},
                         {frac<S>(1, 2), frac<S>(-1, 2)},
                         {frac<S>(5, 6), frac<S>(-1, 2)},
                         {S(0), S(0)}};
  ConvexPolygon<S> upper{{frac<S>(-1, 6), frac<S>(-1, 6)},
                         {S(0), S(0)},
                         {frac<S>(-1, 2), frac<S>(5, 6)},
                         {frac<S>(-1, 2), frac<S>(1, 2)}};
  return {std::move(lower), std::move(upper)};
}

template <class S>
bool theta_contains(const std::array<ConvexPolygon<S>, 2>& theta,
                    const Vec2<S>& p) {
  return theta[0].contains(p) || theta[1].contains(p);
}

// {y >= x} as a closed half-plane.
template <class S>
HalfPlane<S> upper_half() {
  return HalfPlane<S>({S(1), S(-1)}, S(0));
}
template <class S>
HalfPlane<S> lower_half() {
  return HalfPlane<S>({S(-1), S(1)}, S(0));
}

// Diagonal swap R = [[0,1],[1,0]]; preserves both Omega and Theta.
template <class S>
PiecewiseLinearMap<S> map_R() {
  PiecewiseLinearMap<S> m;
  m.branches.push_back({{}, Mat2<S>{S(0), S(1), S(1), S(0)}, {S(0), S(0)}});
  return m;
}

// A preserves Omega (shifted coordinates), mapping Omega^{pm +} onto
// Omega^{pm -}. Piecewise linear across {y = x}; the two branches agree on
// the diagonal.
template <class S>
PiecewiseLinearMap<S> map_A() {
  PiecewiseLinearMap<S> m;
  m.branches.push_back(
      {{upper_half<S>()}, Mat2<S>{S(2), S(-3), S(1), S(-2)}, {S(0), S(0)}});
  m.branches.push_back(
      {{lower_half<S>()}, Mat2<S>{S(-2), S(1), S(-3), S(2)}, {S(0), S(0)}});
  return m;
}

// Theta-side involution A^T, applied branch-by-half. The two branches do NOT
// agree on the segment of {y = x} inside Theta (the image of the slit), so
// this map is only used on points strictly off the diagonal.
template <class S>
PiecewiseLinearMap<S> map_A_theta() {
  PiecewiseLinearMap<S> m;
  m.branches.push_back(
      {{upper_half<S>()}, Mat2<S>{S(2), S(1), S(-3), S(-2)}, {S(0), S(0)}});
  m.branches.push_back(
      {{lower_half<S>()}, Mat2<S>{S(-2), S(-3), S(1), S(2)}, {S(0), S(0)}});
  return m;
}

// Image-plane symmetries of the isothermal coordinates.
template <class S>
PiecewiseLinearMap<S> map_G() {
  PiecewiseLinearMap<S> m;
  m.branches.push_back({{}, Mat2<S>{S(-1), S(0), S(0), S(1)}, {S(0), S(0)}});
  return m;
}
template <class S>
PiecewiseLinearMap<S> map_H() {
  PiecewiseLinearMap<S> m;
  m.branches.push_back({{}, Mat2<S>{S(1), S(0), S(0), S(-1)}, {S(0), S(0)}});
  return m;
}

// Unshifted variants fix (1/2,1/2) instead of the origin.
template <class S>
PiecewiseLinearMap<S> unshift_map(const PiecewiseLinearMap<S>& shifted) {
  const Vec2<S> c{frac<S>(1, 2), frac<S>(1, 2)};
  PiecewiseLinearMap<S> m = shifted;
  for (auto& b : m.branches) {
    b.offset = c - b.matrix * c + b.offset;
    for (auto& h : b.region) h.offset = h.offset + h.normal.dot(c);
  }
  return m;
}

// Quadrant decomposition (shifted coordinates).
enum class Quadrant { PP, PM, MP, MM, Boundary };

template <class S>
Quadrant omega_quadrant(const Vec2<S>& p, double tol = 0.0) {
  const double d1 = to_double(p.y - p.x);
  if (std::abs(d1) <= tol) return Quadrant::Boundary;
  if (d1 > 0) {
    const double d2 = to_double(S(3) * p.y - p.x);
    if (std::abs(d2) <= tol) return Quadrant::Boundary;
    return d2 > 0 ? Quadrant::PP : Quadrant::PM;
  }
  const double d2 = to_double(S(3) * p.x - p.y);
  if (std::abs(d2) <= tol) return Quadrant::Boundary;
  return d2 > 0 ? Quadrant::MP : Quadrant::MM;
}

template <class S>
Quadrant theta_quadrant(const Vec2<S>& p, double tol = 0.0) {
  const double d1 = to_double(p.y - p.x);
  const double d2 = to_double(p.y + p.x);
  if (std::abs(d1) <= tol || std::abs(d2) <= tol) return Quadrant::Boundary;
  if (d1 > 0) return d2 > 0 ? Quadrant::PP : Quadrant::PM;
  return d2 > 0 ? Quadrant::MP : Quadrant::MM;
}

// Fundamental domain Theta^{++} of the Z2 x Z2 action on the target.
inline ConvexPolygond theta_fundamental_domain() {
  auto upper = theta_shifted<double>()[1];
  auto clipped = clip_halfplane(upper, HalfPlaned({-1.0, -1.0}, 0.0));
  return *clipped;  // nonempty by construction
}

// Omega^{++} piece, fundamental domain for the identity-transport fixture.
inline ConvexPolygond omega_fundamental_domain() {
  auto half = clip_halfplane(omega_shifted<double>(),
                             HalfPlaned({1.0, -1.0}, 0.0));
  auto piece = clip_halfplane(*half, HalfPlaned({1.0, -3.0}, 0.0));
  return *piece;
}

// The slit {y = x >= 0} in shifted coordinates.
inline double slit_distance(const Vec2d& p) {
  return segment_distance(p, {0.0, 0.0}, {0.5, 0.5});
}

}  // namespace kite::domains

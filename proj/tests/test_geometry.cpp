#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kite/domains.hpp"
#include "kite/geometry.hpp"
#include "kite/rng.hpp"

using namespace kite;
namespace dom = kite::domains;

TEST_CASE("shoelace area on frozen shapes") {
  ConvexPolygond square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(polygon_area(square) == doctest::Approx(1.0));

  // Hand shoelace for the kite: 2A = 1/3 + 1/3 = 2/3.
  const auto omega = dom::omega_unshifted<Rat>();
  CHECK(polygon_area(omega) == Rat(1, 3));

  // The two target quads together have 16x the source area (exact).
  const auto theta = dom::theta_unshifted<Rat>();
  CHECK(theta[0].area() + theta[1].area() == Rat(16, 3));
  CHECK(theta[0].area() + theta[1].area() == Rat(16) * omega.area());

  const auto theta_s = dom::theta_shifted<Rat>();
  CHECK(theta_s[0].area() + theta_s[1].area() ==
        dom::omega_shifted<Rat>().area());
}

TEST_CASE("clip_halfplane basics") {
  ConvexPolygond square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  auto left = clip_halfplane(square, HalfPlaned({1.0, 0.0}, 0.5));
  REQUIRE(left.has_value());
  CHECK(polygon_area(*left) == doctest::Approx(0.5));

  CHECK(!clip_halfplane(square, HalfPlaned({1.0, 0.0}, -1.0)).has_value());

  // Half of the shifted kite below the diagonal: area 1/6 by R-symmetry.
  const auto omega = dom::omega_shifted<Rat>();
  auto lower = clip_halfplane(omega, dom::lower_half<Rat>());
  REQUIRE(lower.has_value());
  CHECK(lower->area() == Rat(1, 6));
}

TEST_CASE("clip area additivity, exact and float") {
  const auto omega_r = dom::omega_shifted<Rat>();
  HalfPlaner h({Rat(2), Rat(-1)}, Rat(1, 7));
  auto a = clip_halfplane(omega_r, h);
  auto b = clip_halfplane(omega_r, h.complement());
  Rat total = (a ? a->area() : Rat(0)) + (b ? b->area() : Rat(0));
  CHECK(total == omega_r.area());

  const auto omega_d = dom::omega_shifted<double>();
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const double angle = rng.uniform(0.0, 2.0 * M_PI);
    HalfPlaned hd({std::cos(angle), std::sin(angle)},
                  rng.uniform(-0.4, 0.4));
    auto pa = clip_halfplane(omega_d, hd);
    auto pb = clip_halfplane(omega_d, hd.complement());
    const double sum = (pa ? to_double(pa->area()) : 0.0) +
                       (pb ? to_double(pb->area()) : 0.0);
    CHECK(sum == doctest::Approx(to_double(omega_d.area())).epsilon(1e-12));
  }
}

TEST_CASE("contains") {
  const auto omega = dom::omega_unshifted<double>();
  CHECK(contains(omega, polygon_centroid(omega)));
  CHECK(!contains(omega, Vec2d{10.0, 10.0}));

  // Vertex of the shifted kite is on the boundary; boundary counts.
  const auto shifted = dom::omega_shifted<Rat>();
  CHECK(contains(shifted, Vec2r{Rat(-1, 2), Rat(-1, 2)}));
}

TEST_CASE("apply_map: R, A and involutions") {
  const auto R = dom::map_R<double>();
  const auto A = dom::map_A<double>();

  const Vec2d rx = apply_map(R, {0.1, 0.3});
  CHECK(rx.x == doctest::Approx(0.3));
  CHECK(rx.y == doctest::Approx(0.1));

  // A on the diagonal: (t, t) -> (-t, -t) through the y >= x branch.
  const Vec2d at = apply_map(A, {0.2, 0.2});
  CHECK(at.x == doctest::Approx(-0.2));
  CHECK(at.y == doctest::Approx(-0.2));

  const Vec2d p{-0.3, -0.1};
  const Vec2d aap = apply_map(A, apply_map(A, p));
  CHECK(aap.x == doctest::Approx(p.x));
  CHECK(aap.y == doctest::Approx(p.y));
}

TEST_CASE("R and A preserve the kite and permute its quadrants") {
  const auto omega = dom::omega_shifted<Rat>();
  const auto R = dom::map_R<Rat>();
  const auto A = dom::map_A<Rat>();

  Rng rng(11);
  const auto omega_d = dom::omega_shifted<double>();
  int checked = 0;
  while (checked < 1000) {
    const Vec2d pd{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    if (!omega_d.contains(pd)) continue;
    ++checked;
    // Exact rational membership of the mapped point.
    const Vec2r p{Rat(pd.x), Rat(pd.y)};
    const Vec2r rp = apply_map(R, p);
    const Vec2r ap = apply_map(A, p);
    CHECK(omega.contains(rp));
    CHECK(omega.contains(ap));
    CHECK(apply_map(R, rp) == p);
    CHECK(apply_map(A, ap) == p);

    // R sends Omega^{+ pm} to Omega^{- pm}; A sends Omega^{pm +} to
    // Omega^{pm -}.
    const auto q = dom::omega_quadrant(pd);
    if (q == dom::Quadrant::Boundary) continue;
    const auto qr = dom::omega_quadrant(to_double(rp));
    const auto qa = dom::omega_quadrant(to_double(ap));
    switch (q) {
      case dom::Quadrant::PP:
        CHECK(qr == dom::Quadrant::MP);
        CHECK(qa == dom::Quadrant::PM);
        break;
      case dom::Quadrant::PM:
        CHECK(qr == dom::Quadrant::MM);
        CHECK(qa == dom::Quadrant::PP);
        break;
      case dom::Quadrant::MP:
        CHECK(qr == dom::Quadrant::PP);
        CHECK(qa == dom::Quadrant::MM);
        break;
      case dom::Quadrant::MM:
        CHECK(qr == dom::Quadrant::PM);
        CHECK(qa == dom::Quadrant::MP);
        break;
      default:
        break;
    }
  }
}

TEST_CASE("piecewise branches agree on shared boundaries") {
  // A's two branches agree on the diagonal; G/H/R are single-branch.
  const auto A = dom::map_A<Rat>();
  for (int k = -5; k <= 5; ++k) {
    const Vec2r p{Rat(k, 17), Rat(k, 17)};
    const auto values = A.applicable_values(p);
    REQUIRE(values.size() == 2);
    CHECK(values[0] == values[1]);
  }
}

TEST_CASE("theta symmetries map the lobes onto each other") {
  const auto theta = dom::theta_shifted<Rat>();
  const auto At = dom::map_A_theta<Rat>();
  const auto R = dom::map_R<Rat>();
  Rng rng(13);
  const auto theta_d = dom::theta_shifted<double>();
  int checked = 0;
  while (checked < 500) {
    const Vec2d pd{rng.uniform(-0.5, 0.9), rng.uniform(-0.5, 0.9)};
    if (!dom::theta_contains(theta_d, pd)) continue;
    if (std::abs(pd.x - pd.y) < 1e-9) continue;  // A^T jumps on the slit
    ++checked;
    const Vec2r p{Rat(pd.x), Rat(pd.y)};
    CHECK(dom::theta_contains(theta, apply_map(At, p)));
    CHECK(dom::theta_contains(theta, apply_map(R, p)));
    CHECK(apply_map(At, apply_map(At, p)) == p);

    const auto q = dom::theta_quadrant(pd);
    if (q == dom::Quadrant::Boundary) continue;
    const auto qa = dom::theta_quadrant(to_double(apply_map(At, p)));
    const auto qr = dom::theta_quadrant(to_double(apply_map(R, p)));
    // A^T flips the second sign, R the first.
    switch (q) {
      case dom::Quadrant::PP:
        CHECK(qa == dom::Quadrant::PM);
        CHECK(qr == dom::Quadrant::MP);
        break;
      case dom::Quadrant::PM:
        CHECK(qa == dom::Quadrant::PP);
        CHECK(qr == dom::Quadrant::MM);
        break;
      case dom::Quadrant::MP:
        CHECK(qa == dom::Quadrant::MM);
        CHECK(qr == dom::Quadrant::PP);
        break;
      case dom::Quadrant::MM:
        CHECK(qa == dom::Quadrant::MP);
        CHECK(qr == dom::Quadrant::PM);
        break;
      default:
        break;
    }
  }
}

TEST_CASE("second moment against closed forms") {
  // Unit square about its center: integral of |x|^2 over [-1/2,1/2]^2 = 1/6.
  ConvexPolygond square{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  CHECK(polygon_second_moment(square, {0.0, 0.0}) ==
        doctest::Approx(1.0 / 6.0));
  // Parallel-axis shift: I(q) = I(centroid) + A |q - centroid|^2.
  CHECK(polygon_second_moment(square, {1.0, 2.0}) ==
        doctest::Approx(1.0 / 6.0 + 5.0));
}

TEST_CASE("polygon construction rejects bad input") {
  CHECK_THROWS_AS(ConvexPolygond({{0, 0}, {1, 0}}), std::invalid_argument);
  // Clockwise ordering violates the counterclockwise invariant.
  CHECK_THROWS_AS(ConvexPolygond({{0, 0}, {0, 1}, {1, 1}, {1, 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(HalfPlaned({0.0, 0.0}, 1.0), std::invalid_argument);
  // Collinear middle vertices are removed at construction.
  ConvexPolygond tri{{0, 0}, {0.5, 0.0}, {1, 0}, {1, 1}};
  CHECK(tri.size() == 3);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kite/potential.hpp"
#include "kite/rng.hpp"
#include "kite/semidiscrete.hpp"

using namespace kite;
namespace dom = kite::domains;

namespace {

const ConvexPolygond& omega() {
  static const ConvexPolygond o = dom::omega_shifted<double>();
  return o;
}

}  // namespace

TEST_CASE("discretize_target: symmetrized orbit structure") {
  CHECK_THROWS_AS(discretize_target(3, 1, 0), std::invalid_argument);

  const auto t4 = discretize_target(4, 42, 3);
  REQUIRE(t4.size() == 4);
  // One site per Theta quadrant piece.
  std::array<int, 4> seen{};
  const auto theta = dom::theta_shifted<double>();
  for (const auto& s : t4.sites) {
    CHECK(dom::theta_contains(theta, s));
    const auto q = dom::theta_quadrant(s);
    REQUIRE(q != dom::Quadrant::Boundary);
    ++seen[(int)q];
  }
  CHECK(seen == std::array<int, 4>{1, 1, 1, 1});

  // Masses sum to area(Omega) = 1/3.
  const auto t = discretize_target(1000, 7, 2);
  double total = 0.0;
  for (double m : t.masses) total += m;
  CHECK(total == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  // The orbit makes the cloud exactly R- and A^T-symmetric.
  const auto R = dom::map_R<double>();
  const auto At = dom::map_A_theta<double>();
  PointGrid grid(t.sites);
  for (std::size_t i = 0; i < t.sites.size(); i += 97) {
    const Vec2d r_img = apply_map(R, t.sites[i]);
    CHECK(distance(t.sites[grid.nearest(r_img)], r_img) < 1e-12);
    const Vec2d a_img = apply_map(At, t.sites[i]);
    CHECK(distance(t.sites[grid.nearest(a_img)], a_img) < 1e-12);
  }
}

TEST_CASE("laguerre cells: bisector split and weight monotonicity") {
  // Two equal-weight sites inside a box: cells split by the perpendicular
  // bisector.
  ConvexPolygond box{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  TargetDiscretization two;
  two.sites = {{0.25, 0.5}, {0.75, 0.5}};
  two.masses = {0.5, 0.5};
  auto d = build_laguerre(box, two.sites, {0.0, 0.0});
  CHECK(d.cells[0].area == doctest::Approx(0.5));
  CHECK(d.cells[1].area == doctest::Approx(0.5));
  for (const auto& v : d.cells[0].verts) CHECK(v.x <= 0.5 + 1e-12);

  // Raising w_0 strictly enlarges cell 0 and shrinks cell 1.
  auto d2 = build_laguerre(box, two.sites, {0.01, 0.0});
  CHECK(d2.cells[0].area > d.cells[0].area);
  CHECK(d2.cells[1].area < d.cells[1].area);
  CHECK(d2.cells[0].area + d2.cells[1].area == doctest::Approx(1.0));
}

TEST_CASE("laguerre cells: power inequality at cell vertices") {
  const auto target = discretize_target(64, 3, 1);
  const auto w0 = feasible_initial_weights(target);
  const auto d = build_laguerre(omega(), target.sites, w0);
  for (std::size_t j = 0; j < target.size(); ++j) {
    const auto& cell = d.cells[j];
    if (cell.empty()) continue;
    for (const auto& v : cell.verts) {
      const double pj = (v - target.sites[j]).norm2() - w0[j];
      for (std::size_t k = 0; k < target.size(); ++k) {
        const double pk = (v - target.sites[k]).norm2() - w0[k];
        CHECK(pj <= pk + 1e-9);
      }
    }
  }
}

TEST_CASE("dual gradient/hessian: 2-site hand value and structure") {
  // Symmetric 2-site configuration in the unit box: shared edge length 1 at
  // site distance 1/2, so c = 1/(2 * 1/2) = 1.
  ConvexPolygond box{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  TargetDiscretization two;
  two.sites = {{0.25, 0.5}, {0.75, 0.5}};
  two.masses = {0.5, 0.5};
  const auto sys = dual_gradient_hessian(box, two, {0.0, 0.0});
  CHECK(sys.gradient[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(sys.hessian.coeff(0, 0) == doctest::Approx(-1.0));
  CHECK(sys.hessian.coeff(0, 1) == doctest::Approx(1.0));
  CHECK(sys.hessian.coeff(1, 0) == doctest::Approx(1.0));
  CHECK(sys.hessian.coeff(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("dual hessian rows sum to zero") {
  const auto target = discretize_target(100, 5, 1);
  const auto w = feasible_initial_weights(target);
  const auto sys = dual_gradient_hessian(omega(), target, w);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(target.size());
  const Eigen::VectorXd rowsum = sys.hessian * ones;
  CHECK(rowsum.lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("solve: single site is trivially converged") {
  TargetDiscretization one;
  one.sites = {{0.1, -0.2}};
  one.masses = {to_double(omega().area())};
  const auto plan = solve(one, {}, 1e-7, 10);
  CHECK(plan.stats.converged);
  CHECK(plan.stats.iterations == 0);
  CHECK(plan.weights[0] == 0.0);
  CHECK(plan.diagram.cells[0].area ==
        doctest::Approx(to_double(omega().area())));
}

TEST_CASE("solve: empty initial cell aborts with report") {
  // At zero weights the far target sites have empty cells in Omega.
  const auto target = discretize_target(256, 11, 1);
  try {
    solve(target, {}, 1e-6, 40);
    FAIL("expected EmptyInitialCellError");
  } catch (const EmptyInitialCellError& e) {
    CHECK(!e.sites.empty());
  }
}

TEST_CASE("solve: 4-site target maps the quadrant pieces") {
  const auto target = discretize_target(4, 42, 5);
  const auto plan = solve_kite(target, 1e-9, 60);
  CHECK(plan.stats.converged);

  // Each cell must coincide with one Omega^{pm pm} piece: the site of the
  // cell containing a quadrant's points is the quadrant's partner.
  Rng rng(5);
  PotentialField field(plan);
  int checked = 0;
  while (checked < 400) {
    const Vec2d x{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    if (!omega().contains(x)) continue;
    const auto qx = dom::omega_quadrant(x, 1e-9);
    if (qx == dom::Quadrant::Boundary) continue;
    ++checked;
    const auto qs = dom::theta_quadrant(field.eval_gradient(x));
    CHECK(qx == qs);
  }

  // Cell areas match the masses at tolerance.
  for (std::size_t j = 0; j < 4; ++j)
    CHECK(plan.diagram.cells[j].area ==
          doctest::Approx(target.masses[j]).epsilon(1e-6));
}

TEST_CASE("solve: mass balance, gauge invariance, symmetry, monotone dual") {
  const auto target = discretize_target(400, 17, 2);
  const auto plan = solve_kite(target, 1e-7, 50);
  CHECK(plan.stats.converged);

  // Mass balance at convergence.
  CHECK(plan.diagram.total_area ==
        doctest::Approx(to_double(omega().area())).epsilon(1e-9));

  // The dual objective never decreased along the iteration.
  for (std::size_t i = 0; i + 1 < plan.stats.dual_trace.size(); ++i)
    CHECK(plan.stats.dual_trace[i + 1] >=
          plan.stats.dual_trace[i] -
              1e-9 * (1 + std::abs(plan.stats.dual_trace[i])));

  // Gauge invariance: shifting all weights leaves every cell unchanged
  // (up to fp noise in hairline vertices).
  std::vector<double> shifted = plan.weights;
  for (double& w : shifted) w += 0.123;
  const auto d2 = build_laguerre(omega(), plan.target.sites, shifted);
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    CHECK(d2.cells[j].area ==
          doctest::Approx(plan.diagram.cells[j].area).epsilon(1e-10));
    CHECK(distance(d2.cells[j].centroid, plan.diagram.cells[j].centroid) <
          1e-9);
  }

  // Symmetry equivariance. R is an isometry of the site cloud, so the
  // solved weights agree along R orbits. A^T is not an isometry; what is
  // preserved there is the Legendre dual value (|y|^2 - w)/2, up to the
  // usual additive gauge.
  const auto R = dom::map_R<double>();
  const auto At = dom::map_A_theta<double>();
  PointGrid grid(plan.target.sites);
  const double tol = 10.0 * 1e-7;
  std::vector<double> dual_delta;
  for (std::size_t j = 0; j < plan.target.size(); ++j) {
    const int jr = grid.nearest(apply_map(R, plan.target.sites[j]));
    if (j % 13 == 0)
      CHECK(std::abs(plan.weights[j] - plan.weights[jr]) < tol);
    const int ja = grid.nearest(apply_map(At, plan.target.sites[j]));
    auto dual_value = [&](int k) {
      return 0.5 * (plan.target.sites[k].norm2() - plan.weights[k]);
    };
    dual_delta.push_back(dual_value(ja) - dual_value((int)j));
  }
  double mean_delta = 0.0;
  for (double d : dual_delta) mean_delta += d;
  mean_delta /= dual_delta.size();
  for (double d : dual_delta) CHECK(std::abs(d - mean_delta) < tol);
}

TEST_CASE("solve: cyclical monotonicity of the transport map") {
  const auto target = discretize_target(256, 23, 2);
  const auto plan = solve_kite(target, 1e-7, 50);
  PotentialField field(plan);
  Rng rng(29);
  int pairs = 0;
  while (pairs < 10000) {
    const Vec2d a{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    const Vec2d b{rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
    if (!omega().contains(a) || !omega().contains(b)) continue;
    ++pairs;
    const Vec2d ta = field.eval_gradient(a);
    const Vec2d tb = field.eval_gradient(b);
    CHECK((a - b).dot(ta - tb) >= -1e-12);
  }
}

TEST_CASE("solve: n=1000 regression baseline") {
  const auto target = discretize_target(1000, 1, 2);
  const auto plan = solve_kite(target, 1e-7, 50);
  CHECK(plan.stats.converged);
  CHECK(plan.stats.iterations <= 30);
  MESSAGE("n=1000 iterations: ", plan.stats.iterations,
          ", seconds: ", plan.stats.seconds);
}

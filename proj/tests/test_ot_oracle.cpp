#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "kite/oracle.hpp"
#include "kite/rng.hpp"

using namespace kite;
using namespace kite::oracle;

namespace {

DiscreteMeasure random_measure(int n, Rng& rng, bool equal_masses) {
  DiscreteMeasure m;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    m.points.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    const double mass = equal_masses ? 1.0 : 0.2 + rng.uniform();
    m.masses.push_back(mass);
    total += mass;
  }
  for (double& mass : m.masses) mass /= total;
  return m;
}

// Brute-force assignment optimum over all permutations (equal masses).
double brute_force_assignment(const DiscreteMeasure& mu,
                              const DiscreteMeasure& nu) {
  const int n = (int)mu.size();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i)
      cost += mu.masses[i] * 0.5 *
              (mu.points[i] - nu.points[perm[i]]).norm2();
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("lp: identical point sets couple diagonally at zero cost") {
  Rng rng(3);
  DiscreteMeasure mu = random_measure(12, rng, false);
  const auto plan = solve_exact_lp(mu, mu);
  CHECK(plan.cost() == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 0; i < 12; ++i)
    CHECK(plan.coupling(i, i) == doctest::Approx(mu.masses[i]).epsilon(1e-9));
  CHECK(plan.marginal_violation() < 1e-10);
}

TEST_CASE("lp: 2x2 hand-enumerated instance") {
  DiscreteMeasure mu{{{0, 0}, {1, 0}}, {0.5, 0.5}};
  DiscreteMeasure nu{{{0, 1}, {1, 1}}, {0.5, 0.5}};
  const auto plan = solve_exact_lp(mu, nu);
  // Identity pairing, each leg |x-y|^2/2 = 1/2: cost = 1/2.
  CHECK(plan.cost() == doctest::Approx(0.5));
  CHECK(plan.coupling(0, 0) == doctest::Approx(0.5));
  CHECK(plan.coupling(1, 1) == doctest::Approx(0.5));
  CHECK(plan.coupling(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("lp: 8x8 equal-mass optimum matches permutation brute force") {
  for (std::uint64_t seed : {5ULL, 6ULL, 7ULL}) {
    Rng rng(seed);
    DiscreteMeasure mu = random_measure(8, rng, true);
    DiscreteMeasure nu = random_measure(8, rng, true);
    const auto plan = solve_exact_lp(mu, nu);
    const double brute = brute_force_assignment(mu, nu);
    CHECK(plan.cost() == doctest::Approx(brute).epsilon(1e-9));
    CHECK(plan.support_size() <= 8 + 8 - 1);
  }
}

TEST_CASE("lp: random masses, marginals and support bound") {
  Rng rng(11);
  DiscreteMeasure mu = random_measure(40, rng, false);
  DiscreteMeasure nu = random_measure(25, rng, false);
  const auto plan = solve_exact_lp(mu, nu);
  CHECK(plan.marginal_violation() < 1e-10);
  CHECK(plan.support_size() <= 40 + 25 - 1);

  // Cyclical monotonicity of the optimal support.
  std::vector<std::pair<Vec2d, Vec2d>> support;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 25; ++j)
      if (plan.coupling(i, j) > 1e-12)
        support.emplace_back(mu.points[i], nu.points[j]);
  Rng pick(13);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& [x1, y1] = support[pick.uniform_index(support.size())];
    const auto& [x2, y2] = support[pick.uniform_index(support.size())];
    CHECK((x1 - x2).dot(y1 - y2) >= -1e-10);
  }
}

TEST_CASE("lp: infeasible mass mismatch") {
  DiscreteMeasure mu{{{0, 0}}, {1.0}};
  DiscreteMeasure nu{{{1, 1}}, {0.5}};
  CHECK_THROWS_AS(solve_exact_lp(mu, nu), InfeasibleError);
}

TEST_CASE("sinkhorn: marginals, regularization gap, identity limit") {
  Rng rng(17);
  DiscreteMeasure mu = random_measure(8, rng, false);
  DiscreteMeasure nu = random_measure(8, rng, false);

  const auto lp = solve_exact_lp(mu, nu);
  const auto sk = solve_sinkhorn(mu, nu, 1e-3, 1e-10);
  CHECK(sk.marginal_violation() < 1e-10);
  // Entropic cost within 1e-3 of the exact optimum, and never below it.
  CHECK(std::abs(sk.cost() - lp.cost()) < 1e-3);
  CHECK(sk.cost() >= lp.cost() - 1e-12);

  // Identical sets: near-diagonal coupling, cost -> 0 with epsilon.
  const auto id_hot = solve_sinkhorn(mu, mu, 1e-1, 1e-9);
  const auto id_cold = solve_sinkhorn(mu, mu, 1e-3, 1e-9);
  CHECK(id_cold.cost() < id_hot.cost());
  CHECK(id_cold.cost() < 1e-2);
}

TEST_CASE("sinkhorn: epsilon must be positive") {
  DiscreteMeasure mu{{{0, 0}}, {1.0}};
  CHECK_THROWS_AS(solve_sinkhorn(mu, mu, 0.0, 1e-9), std::invalid_argument);
}

TEST_CASE("quantize_plan: cell-proportional quadrature covers the domain") {
  const auto target = discretize_target(16, 9, 2);
  const auto plan = solve_kite(target, 1e-8, 50);
  const auto q = quantize_plan(plan, 64);
  CHECK((int)q.size() >= 48);
  CHECK((int)q.size() <= 80);
  CHECK(q.total() ==
        doctest::Approx(to_double(plan.domain.area())).epsilon(1e-9));
  for (const auto& p : q.points) CHECK(plan.domain.contains(p));
}

TEST_CASE("cross validation: single site equals the polygon second moment") {
  TargetDiscretization one;
  one.sites = {{0.05, -0.15}};
  one.masses = {to_double(domains::omega_shifted<double>().area())};
  const auto plan = solve(one, {}, 1e-7, 5);
  const auto rep = cross_validate(plan, 64);

  const double analytic = 0.5 * polygon_second_moment(
                                    plan.domain, one.sites[0]);
  CHECK(rep.semidiscrete_cost == doctest::Approx(analytic).epsilon(1e-12));
  // With the lumping correction the quadrature side is exact too: every
  // cell couples to the single site and the parallel-axis identity closes.
  CHECK(rep.lp_cost == doctest::Approx(analytic).epsilon(1e-10));
}

TEST_CASE("cross validation: gap small at n=m=16 and shrinking in m") {
  const auto target = discretize_target(16, 9, 2);
  const auto plan = solve_kite(target, 1e-8, 50);

  const auto r16 = cross_validate(plan, 16);
  CHECK(r16.relative_gap <= 0.02);

  const auto r64 = cross_validate(plan, 64);
  const auto r256 = cross_validate(plan, 256);
  // Monotone refinement with a 10% noise allowance.
  CHECK(r64.relative_gap <= r16.relative_gap * 1.10);
  CHECK(r256.relative_gap <= r64.relative_gap * 1.10);
}

TEST_CASE("lp cost never exceeds sinkhorn cost") {
  for (std::uint64_t seed : {21ULL, 22ULL, 23ULL, 24ULL}) {
    Rng rng(seed);
    DiscreteMeasure mu = random_measure(12, rng, false);
    DiscreteMeasure nu = random_measure(9, rng, false);
    const auto lp = solve_exact_lp(mu, nu);
    const auto sk = solve_sinkhorn(mu, nu, 5e-3, 1e-9);
    CHECK(lp.cost() <= sk.cost() + 1e-12);
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "kite/ctransform.hpp"
#include "kite/reduction.hpp"
#include "kite/simplex.hpp"

using namespace kite;
using namespace kite::simplex;

TEST_CASE("vertex data") {
  CHECK(m_vertex(0) == Vec3{Rat(1), Rat(1), Rat(1)});
  CHECK(m_vertex(1) == Vec3{Rat(-3), Rat(1), Rat(1)});
  CHECK(n_vertex(0) == Vec3{Rat(-1), Rat(-1), Rat(-1)});
  CHECK(m_mid(2, 3) == Vec3{Rat(1), Rat(-1), Rat(-1)});
  CHECK(n_mid(0, 1) == Vec3{Rat(0), Rat(-1, 2), Rat(-1, 2)});
  CHECK(n_bary(0, 1, 3) == Vec3{Rat(0), Rat(-1, 3), Rat(0)});
  // <m_i, n_1> enumerates to {1, -3, 1, 1}.
  CHECK(m_vertex(0).dot(n_vertex(1)) == Rat(1));
  CHECK(m_vertex(1).dot(n_vertex(1)) == Rat(-3));
  CHECK(m_vertex(2).dot(n_vertex(1)) == Rat(1));
  CHECK(m_vertex(3).dot(n_vertex(1)) == Rat(1));
}

TEST_CASE("q01 chart hits the printed values exactly") {
  const Chart q01(Chart::Side::B, 0, 1);
  CHECK(q01.inverse(n_mid(0, 1)) == Vec2r{Rat(1, 2), Rat(1, 2)});
  CHECK(q01.inverse(n_vertex(0)) == Vec2r{Rat(0), Rat(0)});
  CHECK(q01.inverse(n_bary(0, 1, 3)) == Vec2r{Rat(1, 3), Rat(0)});
  CHECK(q01.inverse(n_vertex(1)) == Vec2r{Rat(1), Rat(1)});
  CHECK(q01.inverse(n_bary(0, 1, 2)) == Vec2r{Rat(0), Rat(1, 3)});
}

TEST_CASE("chart forward/inverse round trips exactly") {
  for (auto side : {Chart::Side::A, Chart::Side::B}) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        const Chart chart(side, i, j);
        int count = 0;
        for (int r = 0; r < 4; ++r) {
          if (r == i) continue;
          const auto& fa = chart.face_affine(r);
          const auto& vs =
              side == Chart::Side::B ? n_vertices() : m_vertices();
          const Tri3 tri{vs[fa.face.verts[0]], vs[fa.face.verts[1]],
                         vs[fa.face.verts[2]]};
          for (const Vec3& p : triangle_grid(tri, 8, true)) {
            const Vec2r u = chart.inverse(p);
            const Vec3 back = chart.forward(u);
            CHECK(chart.inverse(back) == u);
            ++count;
          }
        }
        CHECK(count >= 60);
      }
    }
  }
}

TEST_CASE("forward rejects points outside the chart image") {
  const Chart q01(Chart::Side::B, 0, 1);
  CHECK_THROWS_AS(q01.forward({Rat(50), Rat(50)}), std::domain_error);
}

TEST_CASE("transition q02 <- q01 equals [[-1,0],[-1,1]] on K") {
  const Chart q01(Chart::Side::B, 0, 1);
  const Chart q02(Chart::Side::B, 0, 2);
  const Tri2 K{Vec2r{Rat(1, 3), Rat(0)}, Vec2r{Rat(1), Rat(1)},
               Vec2r{Rat(1, 2), Rat(1, 2)}};
  const auto t = transition_matrix(q01, q02, K);
  CHECK(t.matrix.a11 == Rat(-1));
  CHECK(t.matrix.a12 == Rat(0));
  CHECK(t.matrix.a21 == Rat(-1));
  CHECK(t.matrix.a22 == Rat(1));
  CHECK(t.offset == Vec2r{Rat(0), Rat(0)});

  // Identity transition of a chart with itself.
  const auto self = transition_matrix(q01, q01, K);
  CHECK(self.matrix.a11 == Rat(1));
  CHECK(self.matrix.a12 == Rat(0));
  CHECK(self.matrix.a21 == Rat(0));
  CHECK(self.matrix.a22 == Rat(1));

  // Non-overlapping charts fail loudly: q01 and q23 share no star.
  const Chart q23(Chart::Side::B, 2, 3);
  CHECK_THROWS(transition_matrix(q01, q23, K));
}

TEST_CASE("gradient representations of the transport partners") {
  // In the tau_2 frame of q01: m_2 -> (4,0), m_{23} -> (2,2),
  // m_{023} -> (16/3,0), m_{123} -> (4/3,4/3), m_3 -> (0,4).
  const Chart q01(Chart::Side::B, 0, 1);
  auto rep = [&](const Vec3& m) {
    return q01.gradient_rep(2, m - m_vertex(1));
  };
  CHECK(rep(m_vertex(2)) == Vec2r{Rat(4), Rat(0)});
  CHECK(rep(m_mid(2, 3)) == Vec2r{Rat(2), Rat(2)});
  CHECK(rep(m_bary(0, 2, 3)) == Vec2r{Rat(16, 3), Rat(0)});
  CHECK(rep(m_bary(1, 2, 3)) == Vec2r{Rat(4, 3), Rat(4, 3)});
  CHECK(rep(m_vertex(3)) == Vec2r{Rat(0), Rat(4)});
}

TEST_CASE("pairing identity on K carries the -4 factor") {
  const Chart q01(Chart::Side::B, 0, 1);
  const Tri2 K{Vec2r{Rat(1, 3), Rat(0)}, Vec2r{Rat(1), Rat(1)},
               Vec2r{Rat(1, 2), Rat(1, 2)}};
  const Vec3 d = m_vertex(1) - m_vertex(2);
  int count = 0;
  for (const Vec2r& u : triangle_grid(K, 9)) {
    CHECK(d.dot(q01.forward(u)) == Rat(-4) * u.x);
    ++count;
  }
  CHECK(count >= 50);
}

TEST_CASE("chart self-check aggregate") {
  const auto rep = reduction::chart_selfcheck();
  CHECK(rep.q01_inverse_of_n01_ok);
  CHECK(rep.kite_vertices_ok);
  CHECK(rep.transition_q01_q02_ok);
  CHECK(rep.transition_round_trip_ok);
  CHECK(rep.pairing_identity_ok);
  CHECK(rep.roundtrip_ok);
  CHECK(rep.roundtrip_points >= 100);
  CHECK(rep.theta_area_ok);
}

TEST_CASE("discrete c-transform on vertex samples") {
  DiscreteFunction<Rat> zero;
  for (int i = 0; i < 4; ++i) {
    zero.points.push_back(m_vertex(i));
    zero.values.push_back(Rat(0));
  }
  std::vector<Vec3> b_targets;
  for (int i = 0; i < 4; ++i) b_targets.push_back(n_vertex(i));

  const auto zc = c_transform(zero, b_targets);
  // max_i <m_i, n_1> = 1.
  CHECK(zc.values[1] == Rat(1));

  // Order reversal: f <= g pointwise implies f^c >= g^c.
  DiscreteFunction<Rat> g = zero;
  for (auto& v : g.values) v = Rat(1, 3);
  const auto gc = c_transform(g, b_targets);
  for (std::size_t i = 0; i < zc.values.size(); ++i)
    CHECK(zc.values[i] >= gc.values[i]);

  // Adding a constant subtracts it from the transform.
  for (std::size_t i = 0; i < zc.values.size(); ++i)
    CHECK(gc.values[i] == zc.values[i] - Rat(1, 3));
}

TEST_CASE("double c-transform is idempotent and dominated") {
  // Richer sample sets: barycentric grids on one face of each side.
  std::vector<Vec3> a_pts =
      triangle_grid(Tri3{m_vertex(1), m_vertex(2), m_vertex(3)}, 5);
  std::vector<Vec3> b_pts =
      triangle_grid(Tri3{n_vertex(0), n_vertex(1), n_vertex(2)}, 5);

  DiscreteFunction<Rat> f;
  f.points = a_pts;
  int k = 0;
  for (const auto& p : a_pts) {
    f.values.push_back(Rat((k * k) % 7, 5) - p.x / 2);
    ++k;
  }

  const auto fc = c_transform(f, b_pts);
  const auto fcc = c_transform(fc, a_pts);
  const auto fccc = c_transform(fcc, b_pts);
  const auto fcccc = c_transform(fccc, a_pts);

  for (std::size_t i = 0; i < f.values.size(); ++i) {
    CHECK(fcc.values[i] <= f.values[i]);       // c-convexification shrinks
    CHECK(fcccc.values[i] == fcc.values[i]);   // and then stabilizes
  }
}

TEST_CASE("c-subgradient argmax for the zero function") {
  DiscreteFunction<Rat> psi;  // zero on the B vertices
  for (int i = 0; i < 4; ++i) {
    psi.points.push_back(n_vertex(i));
    psi.values.push_back(Rat(0));
  }
  std::vector<Vec3> a_pts;
  for (int i = 0; i < 4; ++i) a_pts.push_back(m_vertex(i));

  const CSubgradient<Rat> sub(psi, a_pts);
  const auto arg = sub.argmax(n_vertex(1));
  // <m, n_1> - psi^c(m): the enumeration picks m_0, m_2, m_3 (value 1 each;
  // psi^c is the same constant for all m here? it is not, so recompute):
  // psi^c(m) = max_i <m, n_i>; arg of <m, n_1> - psi^c(m).
  // m_0: 1 - 1 = 0; m_1: -3 - 1 = -4; m_2: 1 - 1 = 0; m_3: 1 - 1 = 0.
  REQUIRE(arg.size() == 3);
  CHECK(arg[0] == 0);
  CHECK(arg[1] == 2);
  CHECK(arg[2] == 3);
}

TEST_CASE("c-subgradient commutes with the 1<->2 vertex swap") {
  // Symmetric psi: value depends on the point only through swap-invariant
  // data. Use psi(n) = max_i <m_i, n> (itself symmetric under the swap).
  std::vector<Vec3> b_pts =
      triangle_grid(Tri3{n_vertex(0), n_vertex(1), n_vertex(2)}, 6);
  // Close the sample set under the swap.
  {
    std::vector<Vec3> extra;
    for (const auto& p : b_pts) extra.push_back(apply_swap12(p));
    b_pts.insert(b_pts.end(), extra.begin(), extra.end());
  }
  DiscreteFunction<Rat> psi;
  psi.points = b_pts;
  for (const auto& n : b_pts) {
    Rat best = m_vertex(0).dot(n);
    for (int i = 1; i < 4; ++i) best = std::max(best, m_vertex(i).dot(n));
    psi.values.push_back(best);
  }
  std::vector<Vec3> a_pts =
      triangle_grid(Tri3{m_vertex(0), m_vertex(1), m_vertex(2)}, 6);
  {
    std::vector<Vec3> extra;
    for (const auto& p : a_pts) extra.push_back(apply_swap12(p));
    a_pts.insert(a_pts.end(), extra.begin(), extra.end());
  }

  const CSubgradient<Rat> sub(psi, a_pts);
  const std::size_t half = a_pts.size() / 2;
  for (const Vec3& n : {n_mid(0, 1), n_bary(0, 1, 2), n_vertex(3)}) {
    const auto arg = sub.argmax(n);
    const auto arg_swapped = sub.argmax(apply_swap12(n));
    // The swap maps sample k to k +- half, so argmax sets correspond.
    std::vector<std::size_t> expected;
    for (std::size_t idx : arg)
      expected.push_back(idx < half ? idx + half : idx - half);
    std::sort(expected.begin(), expected.end());
    CHECK(arg_swapped == expected);
  }
}

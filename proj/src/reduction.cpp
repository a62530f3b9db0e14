#include "kite/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "kite/domains.hpp"
#include "kite/rng.hpp"

namespace kite::reduction {

using simplex::Chart;
using simplex::Tri2;
using simplex::Tri3;
using simplex::Vec3;

namespace {

Vec2d to_d(const Vec2r& v) { return {to_double(v.x), to_double(v.y)}; }

struct Vec3d_ {
  double x, y, z;
};
Vec3d_ to_d(const Vec3& v) {
  return {to_double(v.x), to_double(v.y), to_double(v.z)};
}
double dot(const Vec3d_& a, const Vec3d_& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

// Unshifted gradient map assembled from the shifted plan:
// T_u(x) = 4 T_s(x - c) + (2, 2), c = (1/2, 1/2).
Vec2d unshifted_map(const PotentialField& field, const Vec2d& x_u) {
  const Vec2d g = field.eval_gradient(x_u - Vec2d{0.5, 0.5});
  return {4.0 * g.x + 2.0, 4.0 * g.y + 2.0};
}

// Unshifted potential psi_{0,1}(x) = 4 phi_s(x - c) + 4 <c, x>.
double unshifted_potential(const PotentialField& field, const Vec2d& x_u) {
  return 4.0 * field.eval_potential(x_u - Vec2d{0.5, 0.5}) +
         2.0 * (x_u.x + x_u.y);
}

// Distance outside a convex hull (0 if inside).
double hull_violation(const std::vector<Vec2d>& hull, const Vec2d& p) {
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2d& a = hull[i];
    const Vec2d& b = hull[(i + 1) % hull.size()];
    const Vec2d nrm{b.y - a.y, a.x - b.x};  // outward for CCW
    worst = std::max(worst, nrm.dot(p - a) / norm(nrm));
  }
  return std::max(0.0, worst);
}

double image_violation(const PotentialField& field, const Tri2& region,
                       const std::vector<Vec2d>& hull, int grid_k) {
  double worst = 0.0;
  for (const Vec2r& u : simplex::triangle_grid(region, grid_k, true)) {
    const Vec2d p = unshifted_map(field, to_d(u));
    worst = std::max(worst, hull_violation(hull, p));
  }
  return worst;
}

}  // namespace

ChartSelfCheck chart_selfcheck() {
  ChartSelfCheck out;
  const Chart q01(Chart::Side::B, 0, 1);
  const Chart q02(Chart::Side::B, 0, 2);

  out.q01_inverse_of_n01_ok =
      q01.inverse(simplex::n_mid(0, 1)) == Vec2r{Rat(1, 2), Rat(1, 2)};

  // Q's corners onto the kite corners.
  out.kite_vertices_ok =
      q01.inverse(simplex::n_vertex(0)) == Vec2r{Rat(0), Rat(0)} &&
      q01.inverse(simplex::n_bary(0, 1, 3)) == Vec2r{Rat(1, 3), Rat(0)} &&
      q01.inverse(simplex::n_vertex(1)) == Vec2r{Rat(1), Rat(1)} &&
      q01.inverse(simplex::n_bary(0, 1, 2)) == Vec2r{Rat(0), Rat(1, 3)};

  const Tri2 K{Vec2r{Rat(1, 3), Rat(0)}, Vec2r{Rat(1), Rat(1)},
               Vec2r{Rat(1, 2), Rat(1, 2)}};
  const auto trans = simplex::transition_matrix(q01, q02, K);
  out.transition_q01_q02_ok =
      trans.matrix.a11 == Rat(-1) && trans.matrix.a12 == Rat(0) &&
      trans.matrix.a21 == Rat(-1) && trans.matrix.a22 == Rat(1) &&
      trans.offset == Vec2r{Rat(0), Rat(0)};

  // The q01->q01 transition must be the identity.
  const auto self = simplex::transition_matrix(q01, q01, K);
  out.transition_round_trip_ok =
      self.matrix.a11 == Rat(1) && self.matrix.a12 == Rat(0) &&
      self.matrix.a21 == Rat(0) && self.matrix.a22 == Rat(1) &&
      self.offset == Vec2r{Rat(0), Rat(0)};

  // <m_1 - m_2, q01(x)> is −4 times the first coordinate on K. (The factor
  // -4 is forced by q01^{-1}(n_{01}) = (1/2,1/2) and the kite image.)
  {
    const Vec3 diff = simplex::m_vertex(1) - simplex::m_vertex(2);
    out.pairing_identity_ok = true;
    for (const Vec2r& u : simplex::triangle_grid(K, 9)) {  // 55 samples
      if (!(diff.dot(q01.forward(u)) == Rat(-4) * u.x))
        out.pairing_identity_ok = false;
    }
  }

  // Round trips: inverse(forward(u)) == u on rational grids over the faces,
  // for every q_{i,j} and p_{i,j}; at least 100 points per chart.
  out.roundtrip_ok = true;
  out.roundtrip_points = std::numeric_limits<int>::max();
  for (int side = 0; side < 2; ++side) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        const Chart chart(side == 0 ? Chart::Side::B : Chart::Side::A, i, j);
        int count = 0;
        for (int r = 0; r < 4; ++r) {
          if (r == i) continue;
          const auto& fa = chart.face_affine(r);
          const auto& vs = side == 0 ? simplex::n_vertices()
                                     : simplex::m_vertices();
          const Tri3 tri{vs[fa.face.verts[0]], vs[fa.face.verts[1]],
                         vs[fa.face.verts[2]]};
          for (const Vec3& p : simplex::triangle_grid(tri, 10, true)) {
            const Vec2r u = chart.inverse(p);
            if (!(chart.inverse(chart.forward(u)) == u))
              out.roundtrip_ok = false;
            ++count;
          }
        }
        out.roundtrip_points = std::min(out.roundtrip_points, count);
      }
    }
  }

  // Unscaled Theta area vs Omega area, exact.
  const auto theta = domains::theta_unshifted<Rat>();
  const auto omega = domains::omega_unshifted<Rat>();
  out.theta_area_ok =
      theta[0].area() + theta[1].area() == Rat(16) * omega.area();
  return out;
}

bool ReductionReport::passed() const {
  bool ok = pairing_bijective;
  for (const auto& p : pairings) ok = ok && p.consistent;
  const double tol = 3.0 * spacing_unshifted;
  ok = ok && singular_distance <= tol;
  ok = ok && t0_image_violation <= tol && k_image_violation <= tol &&
       kp_image_violation <= tol;
  ok = ok && chain_rule_median <= 1.5 * spacing_unshifted;
  ok = ok && subgradient_distance <= a_sample_spacing;
  return ok;
}

ReductionReport verify_reduction(const PotentialField& field, int grid_k) {
  ReductionReport rep;
  rep.spacing_unshifted = 4.0 * field.mean_spacing();

  // (a) c-pairing maximization between the four subregions of Q and P.
  {
    const auto qs = simplex::q_subregions();
    const auto ps = simplex::p_subregions();
    std::vector<Vec3> p_samples;
    std::vector<int> p_piece;
    for (int piece = 0; piece < 4; ++piece) {
      for (const Vec3& m : simplex::triangle_grid(ps[piece], grid_k, true)) {
        p_samples.push_back(m);
        p_piece.push_back(piece);
      }
    }
    bool bijective = true;
    std::array<bool, 4> used{};
    for (int piece = 0; piece < 4; ++piece) {
      SubregionPairing& pairing = rep.pairings[piece];
      pairing.q_piece = piece;
      pairing.consistent = true;
      for (const Vec3& n : simplex::triangle_grid(qs[piece], grid_k, true)) {
        // Exact argmax of <m, n> over the P samples.
        Rat best;
        std::vector<int> arg;
        for (std::size_t s = 0; s < p_samples.size(); ++s) {
          const Rat v = p_samples[s].dot(n);
          if (arg.empty() || v > best) {
            best = v;
            arg.assign(1, (int)s);
          } else if (v == best) {
            arg.push_back((int)s);
          }
        }
        int piece_of_max = p_piece[arg[0]];
        for (int idx : arg)
          if (p_piece[idx] != piece_of_max) pairing.consistent = false;
        if (pairing.p_piece == -1) pairing.p_piece = piece_of_max;
        if (pairing.p_piece != piece_of_max) pairing.consistent = false;
        ++pairing.samples;
      }
      if (pairing.p_piece >= 0) {
        if (used[pairing.p_piece]) bijective = false;
        used[pairing.p_piece] = true;
      }
    }
    rep.pairing_bijective =
        bijective && used[0] && used[1] && used[2] && used[3];
  }

  // (b) image triangles of the assembled unshifted map.
  {
    const Tri2 t0_a{Vec2r{Rat(0), Rat(0)}, Vec2r{Rat(1, 3), Rat(0)},
                    Vec2r{Rat(1, 2), Rat(1, 2)}};
    const Tri2 t0_b{Vec2r{Rat(0), Rat(0)}, Vec2r{Rat(1, 2), Rat(1, 2)},
                    Vec2r{Rat(0), Rat(1, 3)}};
    const Tri2 K{Vec2r{Rat(1, 3), Rat(0)}, Vec2r{Rat(1), Rat(1)},
                 Vec2r{Rat(1, 2), Rat(1, 2)}};
    const Tri2 Kp{Vec2r{Rat(0), Rat(1, 3)}, Vec2r{Rat(1), Rat(1)},
                  Vec2r{Rat(1, 2), Rat(1, 2)}};
    const std::vector<Vec2d> hull_t0{{4.0 / 3, 4.0 / 3}, {4, 0}, {0, 4}};
    const std::vector<Vec2d> hull_k{{4, 0}, {16.0 / 3, 0}, {2, 2}};
    const std::vector<Vec2d> hull_kp{{0, 4}, {2, 2}, {0, 16.0 / 3}};
    rep.t0_image_violation =
        std::max(image_violation(field, t0_a, hull_t0, grid_k),
                 image_violation(field, t0_b, hull_t0, grid_k));
    rep.k_image_violation = image_violation(field, K, hull_k, grid_k);
    rep.kp_image_violation = image_violation(field, Kp, hull_kp, grid_k);

    rep.singular_image = unshifted_map(field, {0.5, 0.5});
    rep.singular_distance =
        distance(rep.singular_image, {2.0, 2.0});
  }

  // (c) chain rule on K: grad psi_{0,1} = M^T grad psi_{0,2} o M + (4, 0),
  // with M = q_{02}^{-1} o q_{01} = [[-1,0],[-1,1]] and grad psi_{0,2} by
  // finite differences of values assembled through the B side.
  {
    const Chart q01(Chart::Side::B, 0, 1);
    const Chart q02(Chart::Side::B, 0, 2);
    const Mat2d M{-1.0, 0.0, -1.0, 1.0};
    const Vec3d_ m1 = to_d(simplex::m_vertex(1));
    const Vec3d_ m2 = to_d(simplex::m_vertex(2));

    // psi_{0,2}(z) = psi(q02(z)) - <m_2, q02(z)>, where psi is assembled on
    // Q from the planar potential: psi(n) = psi_{0,1}(q01^{-1} n) + <m_1, n>.
    auto psi02 = [&](const Vec2d& z) {
      const Vec3 n = q02.forward({Rat(z.x), Rat(z.y)});
      const Vec2d x_u = to_d(q01.inverse(n));
      const Vec3d_ nd = to_d(n);
      return unshifted_potential(field, x_u) + dot(m1, nd) - dot(m2, nd);
    };

    const Tri2 K{Vec2r{Rat(1, 3), Rat(0)}, Vec2r{Rat(1), Rat(1)},
                 Vec2r{Rat(1, 2), Rat(1, 2)}};
    const double h = 2.0 * field.mean_spacing();
    const auto omega_u = domains::omega_unshifted<double>();
    std::vector<double> devs;
    for (const Vec2r& ur : simplex::triangle_grid(K, grid_k, true)) {
      const Vec2d x = to_d(ur);
      // The finite-difference probes pull back to x +- h M e; skip points
      // whose probes would leave the chart kite.
      bool probes_ok = true;
      for (const Vec2d& off : {Vec2d{-h, -h}, Vec2d{h, h}, Vec2d{0.0, h},
                               Vec2d{0.0, -h}}) {
        if (!omega_u.contains(x + off)) probes_ok = false;
      }
      if (!probes_ok) continue;
      const Vec2d lhs = unshifted_map(field, x);
      const Vec2d z = M * x;
      const Vec2d grad02{(psi02(z + Vec2d{h, 0}) - psi02(z - Vec2d{h, 0})) /
                             (2 * h),
                         (psi02(z + Vec2d{0, h}) - psi02(z - Vec2d{0, h})) /
                             (2 * h)};
      const Vec2d rhs = M.transpose() * grad02 + Vec2d{4.0, 0.0};
      devs.push_back(distance(lhs, rhs));
      rep.chain_rule_max = std::max(rep.chain_rule_max, distance(lhs, rhs));
    }
    rep.chain_rule_median = median(std::move(devs));
  }

  // Discrete c-subgradient at the singular point n_{01}.
  {
    std::vector<Vec3> b_points;
    std::vector<double> psi_vals;
    const Chart q01(Chart::Side::B, 0, 1);
    for (const Tri3& tri : simplex::q_face_triangles()) {
      for (const Vec3& n : simplex::triangle_grid(tri, grid_k)) {
        const Vec2d x_u = to_d(q01.inverse(n));
        b_points.push_back(n);
        psi_vals.push_back(unshifted_potential(field, x_u) +
                           dot(to_d(simplex::m_vertex(1)), to_d(n)));
      }
    }
    std::vector<Vec3> a_points;
    for (const Tri3& tri : simplex::p_face_triangles())
      for (const Vec3& m : simplex::triangle_grid(tri, grid_k))
        a_points.push_back(m);

    simplex::DiscreteFunction<double> psi{b_points, psi_vals};
    const simplex::CSubgradient<double> sub(psi, a_points);
    const auto arg = sub.argmax(simplex::n_mid(0, 1));

    const Vec3d_ m23 = to_d(simplex::m_mid(2, 3));
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t idx : arg) {
      const Vec3d_ m = to_d(a_points[idx]);
      best = std::min(best, std::sqrt((m.x - m23.x) * (m.x - m23.x) +
                                      (m.y - m23.y) * (m.y - m23.y) +
                                      (m.z - m23.z) * (m.z - m23.z)));
    }
    rep.subgradient_distance = best;
    // Longest grid edge over the P triangles.
    double edge = 0.0;
    for (const Tri3& tri : simplex::p_face_triangles()) {
      for (int e = 0; e < 3; ++e) {
        const Vec3d_ a = to_d(tri[e]);
        const Vec3d_ b = to_d(tri[(e + 1) % 3]);
        edge = std::max(edge, std::sqrt((a.x - b.x) * (a.x - b.x) +
                                        (a.y - b.y) * (a.y - b.y) +
                                        (a.z - b.z) * (a.z - b.z)));
      }
    }
    rep.a_sample_spacing = edge / grid_k;
  }

  return rep;
}

}  // namespace kite::reduction

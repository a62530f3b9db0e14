#include "kite/simplex.hpp"

#include <stdexcept>

namespace kite::simplex {

namespace {

std::array<int, 2> remaining_indices(int i, int j) {
  std::array<int, 2> out{};
  int pos = 0;
  for (int r = 0; r < 4; ++r)
    if (r != i && r != j) out[pos++] = r;
  return out;  // ascending: out[0] < out[1]
}

// Solves the 3x3 rational system M x = rhs by Cramer's rule; columns given.
Vec3 solve3(const Vec3& c0, const Vec3& c1, const Vec3& c2, const Vec3& rhs) {
  auto det3 = [](const Vec3& a, const Vec3& b, const Vec3& c) {
    return a.x * (b.y * c.z - b.z * c.y) - b.x * (a.y * c.z - a.z * c.y) +
           c.x * (a.y * b.z - a.z * b.y);
  };
  const Rat d = det3(c0, c1, c2);
  if (d == 0) throw std::runtime_error("singular 3x3 system");
  return {det3(rhs, c1, c2) / d, det3(c0, rhs, c2) / d, det3(c0, c1, rhs) / d};
}

}  // namespace

const std::array<Vec3, 4>& m_vertices() {
  static const std::array<Vec3, 4> verts = {
      Vec3{Rat(1), Rat(1), Rat(1)}, Vec3{Rat(-3), Rat(1), Rat(1)},
      Vec3{Rat(1), Rat(-3), Rat(1)}, Vec3{Rat(1), Rat(1), Rat(-3)}};
  return verts;
}

const std::array<Vec3, 4>& n_vertices() {
  static const std::array<Vec3, 4> verts = {
      Vec3{Rat(-1), Rat(-1), Rat(-1)}, Vec3{Rat(1), Rat(0), Rat(0)},
      Vec3{Rat(0), Rat(1), Rat(0)}, Vec3{Rat(0), Rat(0), Rat(1)}};
  return verts;
}

Vec3 m_vertex(int i) { return m_vertices().at(i); }
Vec3 n_vertex(int i) { return n_vertices().at(i); }

Vec3 m_mid(int i, int j) { return (m_vertex(i) + m_vertex(j)) / Rat(2); }
Vec3 n_mid(int i, int j) { return (n_vertex(i) + n_vertex(j)) / Rat(2); }

Vec3 m_bary(int i, int j, int k) {
  return (m_vertex(i) + m_vertex(j) + m_vertex(k)) / Rat(3);
}
Vec3 n_bary(int i, int j, int k) {
  return (n_vertex(i) + n_vertex(j) + n_vertex(k)) / Rat(3);
}

Face a_face(int r) {
  Face f{true, r, {}};
  int pos = 0;
  for (int s = 0; s < 4; ++s)
    if (s != r) f.verts[pos++] = s;
  return f;
}

Face b_face(int r) {
  Face f = a_face(r);
  f.a_side = false;
  return f;
}

bool on_face(const Face& face, const Vec3& p) {
  const auto& vs = face.a_side ? m_vertices() : n_vertices();
  const Vec3& v0 = vs[face.verts[0]];
  const Vec3& v1 = vs[face.verts[1]];
  const Vec3& v2 = vs[face.verts[2]];
  // Barycentric coordinates: p = a v0 + b v1 + c v2 with a + b + c = 1.
  // The vertex matrix is invertible because the faces are nondegenerate.
  const Vec3 bary = solve3(v0, v1, v2, p);
  if (bary.x + bary.y + bary.z != Rat(1)) return false;
  return bary.x >= 0 && bary.y >= 0 && bary.z >= 0;
}

Vec3 apply_swap12(const Vec3& p) { return {p.y, p.x, p.z}; }

Chart::Chart(Side side, int i, int j) : side_(side), i_(i), j_(j) {
  if (i < 0 || i > 3 || j < 0 || j > 3 || i == j)
    throw std::invalid_argument("chart indices must be distinct in 0..3");
  const auto [k, l] = remaining_indices(i, j);
  if (side == Side::B) {
    // q_{i,j}^{-1}(n) = 1/4 (<m_k - m_j, n>, <m_l - m_j, n>)
    pair_u_ = m_vertex(k) - m_vertex(j);
    pair_v_ = m_vertex(l) - m_vertex(j);
    scale_ = Rat(1, 4);
  } else {
    // p_{i,j}^{-1}(m) = (<m, n_j - n_k>, <m, n_j - n_l>)
    pair_u_ = n_vertex(j) - n_vertex(k);
    pair_v_ = n_vertex(j) - n_vertex(l);
    scale_ = Rat(1);
  }

  // Affine inverse of the chart formula on each face of the star of vertex i.
  for (int r = 0; r < 4; ++r) {
    if (r == i) continue;  // the opposite face is collapsed by the chart
    const Face face = side == Side::B ? b_face(r) : a_face(r);
    const auto& vs = side == Side::B ? n_vertices() : m_vertices();
    const Vec3& v0 = vs[face.verts[0]];
    const Vec3& v1 = vs[face.verts[1]];
    const Vec3& v2 = vs[face.verts[2]];
    // Barycentric pre-images of the plane basis: solve for the affine map
    // u -> a(u) v0 + b(u) v1 + c(u) v2 with constraints from `inverse`.
    // Rows: <pair_u, .> * scale = u.x ; <pair_v, .> * scale = u.y ; a+b+c = 1.
    const Vec3 row0{scale_ * pair_u_.dot(v0), scale_ * pair_u_.dot(v1),
                    scale_ * pair_u_.dot(v2)};
    const Vec3 row1{scale_ * pair_v_.dot(v0), scale_ * pair_v_.dot(v1),
                    scale_ * pair_v_.dot(v2)};
    const Vec3 row2{Rat(1), Rat(1), Rat(1)};
    // Column view of the system matrix.
    const Vec3 c0{row0.x, row1.x, row2.x};
    const Vec3 c1{row0.y, row1.y, row2.y};
    const Vec3 c2{row0.z, row1.z, row2.z};
    const Vec3 bary_eu = solve3(c0, c1, c2, {Rat(1), Rat(0), Rat(0)});
    const Vec3 bary_ev = solve3(c0, c1, c2, {Rat(0), Rat(1), Rat(0)});
    const Vec3 bary_0 = solve3(c0, c1, c2, {Rat(0), Rat(0), Rat(1)});
    FaceAffine fa;
    fa.face = face;
    fa.col_u = v0 * bary_eu.x + v1 * bary_eu.y + v2 * bary_eu.z;
    fa.col_v = v0 * bary_ev.x + v1 * bary_ev.y + v2 * bary_ev.z;
    fa.offset = v0 * bary_0.x + v1 * bary_0.y + v2 * bary_0.z;
    faces_[r] = fa;
  }
}

Vec2r Chart::inverse(const Vec3& p) const {
  return {scale_ * pair_u_.dot(p), scale_ * pair_v_.dot(p)};
}

Vec3 Chart::forward(const Vec2r& u) const {
  for (int r = 0; r < 4; ++r) {
    if (!faces_[r]) continue;
    const FaceAffine& fa = *faces_[r];
    const Vec3 p = fa.col_u * u.x + fa.col_v * u.y + fa.offset;
    if (on_face(fa.face, p)) return p;
  }
  throw std::domain_error("point outside chart image");
}

const Chart::FaceAffine& Chart::face_affine(int r) const {
  if (r < 0 || r > 3 || !faces_[r])
    throw std::invalid_argument("no face restriction for this index");
  return *faces_[r];
}

Vec2r Chart::gradient_rep(int r, const Vec3& m) const {
  const FaceAffine& fa = face_affine(r);
  return {m.dot(fa.col_u), m.dot(fa.col_v)};
}

AffineMap2 transition_matrix(const Chart& from, const Chart& to,
                             const Tri2& region) {
  auto through = [&](const Vec2r& u) {
    const Vec3 p = from.forward(u);
    const Vec2r w = to.inverse(p);
    // p must lie in the `to` chart's star as well; the collapsed face of a
    // chart maps through its linear formula but does not round-trip.
    if (!(to.forward(w) == p))
      throw std::domain_error("charts do not overlap on region");
    return w;
  };

  const Vec2r w0 = through(region[0]);
  const Vec2r w1 = through(region[1]);
  const Vec2r w2 = through(region[2]);
  const Vec2r d1 = region[1] - region[0];
  const Vec2r d2 = region[2] - region[0];
  const Rat det = d1.cross(d2);
  if (det == 0)
    throw std::invalid_argument("degenerate transition region");
  const Vec2r e1 = w1 - w0;
  const Vec2r e2 = w2 - w0;
  // M [d1 d2] = [e1 e2]  =>  M = [e1 e2] [d1 d2]^{-1}.
  Mat2r m{(e1.x * d2.y - e2.x * d1.y) / det, (e2.x * d1.x - e1.x * d2.x) / det,
          (e1.y * d2.y - e2.y * d1.y) / det, (e2.y * d1.x - e1.y * d2.x) / det};
  AffineMap2 map{m, w0 - m * region[0]};

  // The affine fit must agree with the true transition on the whole region.
  for (const Vec2r& u : triangle_grid(region, 6)) {
    if (!(through(u) == map.apply(u)))
      throw std::domain_error("charts do not overlap affinely on region");
  }
  return map;
}

std::vector<Vec2r> triangle_grid(const Tri2& tri, int k, bool interior_only) {
  std::vector<Vec2r> out;
  const int lo = interior_only ? 1 : 0;
  for (int a = lo; a <= k - 2 * lo; ++a) {
    for (int b = lo; a + b <= k - lo; ++b) {
      const int c = k - a - b;
      const Rat ka(a, k), kb(b, k), kc(c, k);
      out.push_back(tri[0] * ka + tri[1] * kb + tri[2] * kc);
    }
  }
  return out;
}

std::vector<Vec3> triangle_grid(const Tri3& tri, int k, bool interior_only) {
  std::vector<Vec3> out;
  const int lo = interior_only ? 1 : 0;
  for (int a = lo; a <= k - 2 * lo; ++a) {
    for (int b = lo; a + b <= k - lo; ++b) {
      const int c = k - a - b;
      out.push_back(tri[0] * Rat(a, k) + tri[1] * Rat(b, k) +
                    tri[2] * Rat(c, k));
    }
  }
  return out;
}

std::array<Tri3, 2> q_face_triangles() {
  // Q = B ∩ Hull{n_0, n_{013}, n_1, n_{012}} splits along the edge n_0-n_1
  // into triangles living in the faces tau_2 and tau_3.
  return {Tri3{n_vertex(0), n_bary(0, 1, 3), n_vertex(1)},
          Tri3{n_vertex(0), n_bary(0, 1, 2), n_vertex(1)}};
}

std::array<Tri3, 2> p_face_triangles() {
  // P = A ∩ Hull{m_2, m_{023}, m_3, m_{123}} splits along the edge m_2-m_3.
  return {Tri3{m_vertex(2), m_bary(0, 2, 3), m_vertex(3)},
          Tri3{m_vertex(2), m_bary(1, 2, 3), m_vertex(3)}};
}

std::array<Tri3, 4> q_subregions() {
  const Vec3 c = n_mid(0, 1);
  return {Tri3{n_vertex(0), n_bary(0, 1, 3), c},
          Tri3{n_bary(0, 1, 3), n_vertex(1), c},
          Tri3{n_vertex(0), n_bary(0, 1, 2), c},
          Tri3{n_bary(0, 1, 2), n_vertex(1), c}};
}

std::array<Tri3, 4> p_subregions() {
  const Vec3 c = m_mid(2, 3);
  return {Tri3{m_vertex(2), m_bary(0, 2, 3), c},
          Tri3{m_bary(0, 2, 3), m_vertex(3), c},
          Tri3{m_vertex(2), m_bary(1, 2, 3), c},
          Tri3{m_bary(1, 2, 3), m_vertex(3), c}};
}

}  // namespace kite::simplex

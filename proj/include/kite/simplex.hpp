#pragma once

#include <array>
#include <optional>
#include <vector>

#include "kite/geometry.hpp"
#include "kite/scalar.hpp"

// Exact affine-chart algebra on the boundary of the symmetric 3-simplex and
// its dual. Everything here runs in rational arithmetic; assertions on these
// objects compare for equality, not within tolerances.
namespace kite::simplex {

struct Vec3 {
  Rat x{}, y{}, z{};

  Vec3() = default;
  Vec3(Rat xx, Rat yy, Rat zz)
      : x(std::move(xx)), y(std::move(yy)), z(std::move(zz)) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(const Rat& k) const { return {x * k, y * k, z * k}; }
  Vec3 operator/(const Rat& k) const { return {x / k, y / k, z / k}; }
  bool operator==(const Vec3& o) const {
    return x == o.x && y == o.y && z == o.z;
  }
  Rat dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

using Tri2 = std::array<Vec2r, 3>;
using Tri3 = std::array<Vec3, 3>;

// Vertices of the simplex Delta (A-side) and of its dual (B-side).
const std::array<Vec3, 4>& m_vertices();
const std::array<Vec3, 4>& n_vertices();

Vec3 m_vertex(int i);
Vec3 n_vertex(int i);
Vec3 m_mid(int i, int j);    // edge midpoints; the A-side singular points
Vec3 n_mid(int i, int j);    // edge midpoints; the B-side singular points
Vec3 m_bary(int i, int j, int k);  // face barycenters
Vec3 n_bary(int i, int j, int k);

// Face sigma_r of A (or tau_r of B) is the hull of the vertices other than r.
struct Face {
  bool a_side;
  int skipped;
  std::array<int, 3> verts;
};
Face a_face(int r);
Face b_face(int r);

// Barycentric membership of a point on a simplex-boundary face; exact.
bool on_face(const Face& face, const Vec3& p);

// Vertex permutation (i j), acting on both A and B by coordinate symmetry.
Vec3 apply_swap12(const Vec3& p);

// A chart p_{i,j} (A-side) or q_{i,j} (B-side): an affine-in-restriction
// homeomorphism between the star of a vertex and a region of the plane.
// `inverse` is the globally defined linear formula; `forward` inverts it
// face by face.
class Chart {
 public:
  enum class Side { A, B };

  Chart(Side side, int i, int j);

  Side side() const { return side_; }
  int i() const { return i_; }
  int j() const { return j_; }

  // The linear chart formula (defined on the star of vertex i).
  Vec2r inverse(const Vec3& p) const;

  // Inverts `inverse` on the star of vertex i; throws std::domain_error for
  // points outside the chart image.
  Vec3 forward(const Vec2r& u) const;

  // Affine restriction of `forward` to the face skipping r (valid r != i):
  // forward(u) = col_u * u.x + col_v * u.y + offset on that piece.
  struct FaceAffine {
    Vec3 col_u, col_v, offset;
    Face face;
  };
  const FaceAffine& face_affine(int r) const;

  // Gradient, with respect to the chart plane coordinates, of the linear
  // functional u -> <m, forward(u)> on the face skipping r. This is how
  // A-side points are represented as planar (sub)gradients of psi_{i,j}.
  Vec2r gradient_rep(int r, const Vec3& m) const;

 private:
  Side side_;
  int i_, j_;
  Vec3 pair_u_, pair_v_;  // inverse = scale * (<pair_u, p>, <pair_v, p>)
  Rat scale_;
  std::array<std::optional<FaceAffine>, 4> faces_;
};

struct AffineMap2 {
  Mat2r matrix;
  Vec2r offset;

  Vec2r apply(const Vec2r& p) const { return matrix * p + offset; }
};

// The exact affine map agreeing with to^{-1} o from on a planar region of
// the `from` chart. Computed from the region's corners and verified on a
// sample grid; throws if the charts do not overlap affinely there.
AffineMap2 transition_matrix(const Chart& from, const Chart& to,
                             const Tri2& region);

// Rational barycentric grids.
std::vector<Vec2r> triangle_grid(const Tri2& tri, int k,
                                 bool interior_only = false);
std::vector<Vec3> triangle_grid(const Tri3& tri, int k,
                                bool interior_only = false);

// The kite neighborhood Q of n_{01} in B and its transport partner P in A,
// each the union of two face triangles, subdivided into the four pieces
// that the transport pairing preserves.
std::array<Tri3, 4> q_subregions();
std::array<Tri3, 4> p_subregions();
std::array<Tri3, 2> q_face_triangles();
std::array<Tri3, 2> p_face_triangles();

}  // namespace kite::simplex

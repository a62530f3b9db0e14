#pragma once

#include <array>

#include "kite/ctransform.hpp"
#include "kite/potential.hpp"

// Verification that the solved planar transport problem agrees with the
// simplex-boundary picture: subregion pairings, image triangles, the
// chart chain rule, and the c-subgradient at the singular point.
namespace kite::reduction {

// Exact chart algebra self-checks (no plan needed).
struct ChartSelfCheck {
  bool q01_inverse_of_n01_ok = false;   // q_{0,1}^{-1}(n_{01}) = (1/2, 1/2)
  bool kite_vertices_ok = false;        // Q corners map onto the kite corners
  bool transition_q01_q02_ok = false;   // [[-1,0],[-1,1]], zero offset
  bool transition_round_trip_ok = false;
  bool pairing_identity_ok = false;     // <m_1 - m_2, q01(x)> = -4 x_1 on K
  bool roundtrip_ok = false;            // all q_{i,j} round trips, 100 points
  bool theta_area_ok = false;           // area(Theta) = 16 area(Omega)
  int roundtrip_points = 0;

  bool all_ok() const {
    return q01_inverse_of_n01_ok && kite_vertices_ok &&
           transition_q01_q02_ok && transition_round_trip_ok &&
           pairing_identity_ok && roundtrip_ok && theta_area_ok;
  }
};

ChartSelfCheck chart_selfcheck();

struct SubregionPairing {
  int q_piece = -1;
  int p_piece = -1;
  bool consistent = false;  // every sample of the Q piece picked one P piece
  int samples = 0;
};

struct ReductionReport {
  std::array<SubregionPairing, 4> pairings;
  bool pairing_bijective = false;

  // Image-triangle containment in unshifted coordinates; violations are
  // distances outside the target hulls.
  double t0_image_violation = 0.0;  // quad piece -> Hull{(4/3,4/3),(4,0),(0,4)}
  double k_image_violation = 0.0;   // K -> Hull{(4,0),(16/3,0),(2,2)}
  double kp_image_violation = 0.0;  // K' -> Hull{(0,4),(0,16/3),(2,2)}

  Vec2d singular_image{0.0, 0.0};   // assembled map at (1/2, 1/2)
  double singular_distance = 0.0;   // distance to (2, 2)
  double spacing_unshifted = 0.0;   // 4 x site spacing

  double chain_rule_median = 0.0;   // |lhs - rhs| over K, unshifted scale
  double chain_rule_max = 0.0;

  double subgradient_distance = 0.0;  // dist of argmax set to m_{23}
  double a_sample_spacing = 0.0;

  bool passed() const;
};

// grid_k controls the rational grid resolution per subregion.
ReductionReport verify_reduction(const PotentialField& field, int grid_k = 24);

}  // namespace kite::reduction

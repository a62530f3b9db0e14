#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "kite/simplex.hpp"

// Discrete c-transform machinery between sampled functions on the simplex
// boundary A and its dual B. Values are either exact rationals (synthetic
// fixtures) or doubles (functions assembled from the planar solver).
namespace kite::simplex {

template <class V>
struct DiscreteFunction {
  std::vector<Vec3> points;
  std::vector<V> values;

  std::size_t size() const { return points.size(); }
};

template <class V>
V pairing(const Vec3& m, const Vec3& n);

template <>
inline Rat pairing<Rat>(const Vec3& m, const Vec3& n) {
  return m.dot(n);
}
template <>
inline double pairing<double>(const Vec3& m, const Vec3& n) {
  return to_double(m.dot(n));
}

// f^c(n) = max_m <m, n> - f(m), the discrete c-transform onto the given
// sample set on the other side.
template <class V>
DiscreteFunction<V> c_transform(const DiscreteFunction<V>& f,
                                const std::vector<Vec3>& target_points) {
  if (f.size() == 0) throw std::invalid_argument("empty sample set");
  DiscreteFunction<V> out;
  out.points = target_points;
  out.values.reserve(target_points.size());
  for (const Vec3& n : target_points) {
    V best = pairing<V>(f.points[0], n) - f.values[0];
    for (std::size_t i = 1; i < f.size(); ++i) {
      const V cand = pairing<V>(f.points[i], n) - f.values[i];
      if (cand > best) best = cand;
    }
    out.values.push_back(best);
  }
  return out;
}

// Discrete c-subgradient: the argmax set of m -> <m, n> - psi^c(m) over the
// A-side samples, where psi^c is the c-transform of psi onto those samples.
// For rational values ties are exact; for doubles the tolerance is relative
// to the value range.
template <class V>
struct CSubgradient {
  DiscreteFunction<V> psi_c;  // on the A-side samples

  CSubgradient(const DiscreteFunction<V>& psi,
               const std::vector<Vec3>& a_points)
      : psi_c(c_transform(psi, a_points)) {}

  std::vector<std::size_t> argmax(const Vec3& n, double tol_rel = 1e-9) const {
    V best = pairing<V>(psi_c.points[0], n) - psi_c.values[0];
    V worst = best;
    std::vector<V> vals(psi_c.size());
    for (std::size_t i = 0; i < psi_c.size(); ++i) {
      vals[i] = pairing<V>(psi_c.points[i], n) - psi_c.values[i];
      best = std::max(best, vals[i]);
      worst = std::min(worst, vals[i]);
    }
    V slack;
    if constexpr (ScalarTraits<V>::exact) {
      slack = V(0);
    } else {
      slack = tol_rel * std::max(1.0, to_double(best - worst));
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < psi_c.size(); ++i)
      if (vals[i] >= best - slack) out.push_back(i);
    return out;
  }
};

}  // namespace kite::simplex

#pragma once

#include <cstdint>
#include <vector>

#include "kite/geometry.hpp"

namespace kite {

// Uniform-grid point index used for neighbor scans, nearest-site location
// and k-nearest queries. Points are fixed at construction.
class PointGrid {
 public:
  explicit PointGrid(std::vector<Vec2d> points);

  const std::vector<Vec2d>& points() const { return points_; }

  // Visits points in ring order (approximately ascending distance from q;
  // each ring is sorted). `fn(index, dist)` returns the current scan bound:
  // scanning stops once a ring's minimum possible distance exceeds it.
  template <class Fn>
  void visit(const Vec2d& q, double initial_bound, Fn&& fn) const;

  // k nearest points to q, ascending by distance.
  std::vector<std::pair<int, double>> k_nearest(const Vec2d& q, int k) const;

  std::vector<int> within_radius(const Vec2d& q, double r) const;

  int nearest(const Vec2d& q) const;

 private:
  int cell_of(double v, double lo, int n) const;
  void gather(int cx, int cy, int ring, std::vector<int>& out) const;

  std::vector<Vec2d> points_;
  double h_ = 1.0;
  Vec2d lo_{0.0, 0.0};
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<int>> buckets_;
};

// Laguerre cell clipped against the source domain. Each edge carries the
// index of the neighboring site whose bisector created it, or -1 for a
// domain-boundary edge.
struct LaguerreCell {
  std::vector<Vec2d> verts;  // counterclockwise
  std::vector<int> labels;   // labels[e] belongs to edge verts[e]->verts[e+1]
  double area = 0.0;
  Vec2d centroid{0.0, 0.0};

  bool empty() const { return verts.empty(); }
};

struct LaguerreDiagram {
  std::vector<LaguerreCell> cells;
  double total_area = 0.0;
  int empty_count = 0;
};

// cell_j = domain ∩ ⋂_{k≠j} {x : <x, y_k - y_j> <= ((|y_k|^2 - w_k) -
// (|y_j|^2 - w_j))/2}, built by iterated half-plane clipping with a
// security-radius neighbor cutoff.
LaguerreDiagram build_laguerre(const ConvexPolygond& domain,
                               const std::vector<Vec2d>& sites,
                               const std::vector<double>& weights,
                               const PointGrid& grid);

// Convenience overload that builds its own grid.
LaguerreDiagram build_laguerre(const ConvexPolygond& domain,
                               const std::vector<Vec2d>& sites,
                               const std::vector<double>& weights);

// --- template implementation ---------------------------------------------

template <class Fn>
void PointGrid::visit(const Vec2d& q, double initial_bound, Fn&& fn) const {
  const int cx = cell_of(q.x, lo_.x, nx_);
  const int cy = cell_of(q.y, lo_.y, ny_);
  double bound = initial_bound;
  std::vector<int> batch;
  std::vector<std::pair<double, int>> sorted;
  const int max_ring = nx_ + ny_ + 2;
  for (int ring = 0; ring <= max_ring; ++ring) {
    const double ring_min = ring > 0 ? (ring - 1) * h_ : 0.0;
    if (ring_min > bound) break;
    batch.clear();
    gather(cx, cy, ring, batch);
    if (batch.empty()) continue;
    sorted.clear();
    for (int idx : batch)
      sorted.emplace_back(distance(points_[idx], q), idx);
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [d, idx] : sorted) {
      if (d > bound) break;
      bound = fn(idx, d);
    }
  }
}

}  // namespace kite

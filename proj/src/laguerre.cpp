#include "kite/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kite/parallel.hpp"

namespace kite {

PointGrid::PointGrid(std::vector<Vec2d> points) : points_(std::move(points)) {
  if (points_.empty()) return;
  Vec2d hi = points_[0];
  lo_ = points_[0];
  for (const auto& p : points_) {
    lo_.x = std::min(lo_.x, p.x);
    lo_.y = std::min(lo_.y, p.y);
    hi.x = std::max(hi.x, p.x);
    hi.y = std::max(hi.y, p.y);
  }
  const double span = std::max({hi.x - lo_.x, hi.y - lo_.y, 1e-9});
  // Aim for a couple of points per bucket; degenerate extents collapse to
  // one row or column.
  const int target = std::max(1, (int)std::sqrt((double)points_.size() / 2.0));
  h_ = span / target;
  nx_ = std::clamp((int)((hi.x - lo_.x) / h_) + 1, 1, 4096);
  ny_ = std::clamp((int)((hi.y - lo_.y) / h_) + 1, 1, 4096);
  buckets_.assign((std::size_t)nx_ * ny_, {});
  for (int i = 0; i < (int)points_.size(); ++i) {
    const int cx = cell_of(points_[i].x, lo_.x, nx_);
    const int cy = cell_of(points_[i].y, lo_.y, ny_);
    buckets_[(std::size_t)cy * nx_ + cx].push_back(i);
  }
}

int PointGrid::cell_of(double v, double lo, int n) const {
  const int c = (int)((v - lo) / h_);
  return std::clamp(c, 0, n - 1);
}

void PointGrid::gather(int cx, int cy, int ring, std::vector<int>& out) const {
  auto take = [&](int gx, int gy) {
    if (gx < 0 || gy < 0 || gx >= nx_ || gy >= ny_) return;
    const auto& b = buckets_[(std::size_t)gy * nx_ + gx];
    out.insert(out.end(), b.begin(), b.end());
  };
  if (ring == 0) {
    take(cx, cy);
    return;
  }
  for (int gx = cx - ring; gx <= cx + ring; ++gx) {
    take(gx, cy - ring);
    take(gx, cy + ring);
  }
  for (int gy = cy - ring + 1; gy <= cy + ring - 1; ++gy) {
    take(cx - ring, gy);
    take(cx + ring, gy);
  }
}

std::vector<std::pair<int, double>> PointGrid::k_nearest(const Vec2d& q,
                                                         int k) const {
  std::vector<std::pair<double, int>> best;
  double bound = std::numeric_limits<double>::infinity();
  visit(q, bound, [&](int idx, double d) {
    best.emplace_back(d, idx);
    std::push_heap(best.begin(), best.end());
    if ((int)best.size() > k) {
      std::pop_heap(best.begin(), best.end());
      best.pop_back();
    }
    return (int)best.size() < k ? std::numeric_limits<double>::infinity()
                                : best.front().first;
  });
  std::sort_heap(best.begin(), best.end());
  std::vector<std::pair<int, double>> out;
  out.reserve(best.size());
  for (const auto& [d, idx] : best) out.emplace_back(idx, d);
  return out;
}

std::vector<int> PointGrid::within_radius(const Vec2d& q, double r) const {
  std::vector<int> out;
  visit(q, r, [&](int idx, double d) {
    if (d <= r) out.push_back(idx);
    return r;
  });
  return out;
}

int PointGrid::nearest(const Vec2d& q) const {
  auto nn = k_nearest(q, 1);
  return nn.empty() ? -1 : nn[0].first;
}

namespace {

// One half-plane clip of a labeled convex cell. Edges are labeled by the
// site index that generated them; the new edge gets `new_label`.
void clip_labeled(std::vector<Vec2d>& verts, std::vector<int>& labels,
                  const HalfPlaned& hp, int new_label) {
  const std::size_t n = verts.size();
  static thread_local std::vector<double> vals;
  vals.resize(n);
  bool any_out = false, any_in = false;
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = hp.value(verts[i]);
    (vals[i] > 0 ? any_out : any_in) = true;
  }
  if (!any_out) return;  // no cut
  if (!any_in) {
    verts.clear();
    labels.clear();
    return;
  }
  std::vector<Vec2d> nv;
  std::vector<int> nl;
  nv.reserve(n + 2);
  nl.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const bool in_i = vals[i] <= 0.0;
    const bool in_j = vals[j] <= 0.0;
    if (in_i) {
      nv.push_back(verts[i]);
      nl.push_back(labels[i]);
      if (!in_j) {
        const double t = vals[i] / (vals[i] - vals[j]);
        nv.push_back(verts[i] + (verts[j] - verts[i]) * t);
        nl.push_back(new_label);
      }
    } else if (in_j) {
      const double t = vals[i] / (vals[i] - vals[j]);
      nv.push_back(verts[i] + (verts[j] - verts[i]) * t);
      nl.push_back(labels[i]);
    }
  }
  // Drop zero-length edges produced by crossings at vertices.
  std::vector<Vec2d> cv;
  std::vector<int> cl;
  for (std::size_t i = 0; i < nv.size(); ++i) {
    const std::size_t j = (i + 1) % nv.size();
    if ((nv[j] - nv[i]).norm2() < 1e-28) continue;
    cv.push_back(nv[i]);
    cl.push_back(nl[i]);
  }
  if (cv.size() < 3) {
    cv.clear();
    cl.clear();
  }
  verts = std::move(cv);
  labels = std::move(cl);
}

void finish_cell(LaguerreCell& cell) {
  if (cell.verts.size() < 3) {
    cell.verts.clear();
    cell.labels.clear();
    cell.area = 0.0;
    return;
  }
  double twice = 0.0;
  Vec2d c{0.0, 0.0};
  for (std::size_t i = 0; i < cell.verts.size(); ++i) {
    const auto& a = cell.verts[i];
    const auto& b = cell.verts[(i + 1) % cell.verts.size()];
    const double w = a.cross(b);
    twice += w;
    c.x += (a.x + b.x) * w;
    c.y += (a.y + b.y) * w;
  }
  cell.area = 0.5 * twice;
  if (cell.area < kDegenerateArea) {
    cell.verts.clear();
    cell.labels.clear();
    cell.area = 0.0;
    return;
  }
  cell.centroid = {c.x / (3.0 * twice), c.y / (3.0 * twice)};
}

}  // namespace

LaguerreDiagram build_laguerre(const ConvexPolygond& domain,
                               const std::vector<Vec2d>& sites,
                               const std::vector<double>& weights,
                               const PointGrid& grid) {
  const std::size_t n = sites.size();
  double w_max = -std::numeric_limits<double>::infinity();
  for (double w : weights) w_max = std::max(w_max, w);

  LaguerreDiagram diagram;
  diagram.cells.resize(n);

  parallel_for(n, [&](std::size_t j) {
    LaguerreCell& cell = diagram.cells[j];
    cell.verts = domain.vertices();
    cell.labels.assign(cell.verts.size(), -1);
    const Vec2d yj = sites[j];
    const double wj = weights[j];
    const double dw = std::max(0.0, w_max - wj);

    auto scan_bound = [&]() {
      double r = 0.0;
      for (const auto& v : cell.verts) r = std::max(r, distance(v, yj));
      // Sites farther than this cannot cut the current cell.
      return r + std::sqrt(r * r + dw);
    };

    double bound = scan_bound();
    grid.visit(yj, bound, [&](int k, double) {
      if (k == (int)j || cell.verts.empty()) return cell.verts.empty() ? -1.0 : bound;
      const Vec2d u = sites[k] - yj;
      const double rhs =
          0.5 * ((sites[k].norm2() - weights[k]) - (yj.norm2() - wj));
      clip_labeled(cell.verts, cell.labels, HalfPlaned(u, rhs), k);
      bound = cell.verts.empty() ? -1.0 : scan_bound();
      return bound;
    });
    finish_cell(cell);
  });

  for (const auto& cell : diagram.cells) {
    diagram.total_area += cell.area;
    if (cell.empty()) ++diagram.empty_count;
  }
  return diagram;
}

LaguerreDiagram build_laguerre(const ConvexPolygond& domain,
                               const std::vector<Vec2d>& sites,
                               const std::vector<double>& weights) {
  PointGrid grid(sites);
  return build_laguerre(domain, sites, weights, grid);
}

}  // namespace kite

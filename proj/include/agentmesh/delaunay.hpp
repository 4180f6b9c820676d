#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "agentmesh/graph.hpp"

namespace agentmesh {

struct Point {
  double x = 0;
  double y = 0;
};

namespace detail {

// Twice the signed area of (a, b, c); positive when counterclockwise.
inline double orient2d(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// Positive when d lies strictly inside the circumcircle of ccw triangle (a, b, c).
inline double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;  // ccw order
};

}  // namespace detail

// Bowyer-Watson triangulation of a 2D point set. Returns the Delaunay edge
// set over point indices, or an empty list when the input is degenerate
// (all points collinear, duplicates) and the caller should resample.
inline std::vector<Edge> delaunay_edges(const std::vector<Point>& pts) {
  using detail::incircle;
  using detail::orient2d;
  using detail::Tri;

  const int n = static_cast<int>(pts.size());
  if (n < 3) return {};

  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const auto& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double span = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double cx = (min_x + max_x) / 2, cy = (min_y + max_y) / 2;

  // Vertices n..n+2 form a super-triangle that encloses every point.
  std::vector<Point> v(pts);
  v.push_back({cx - 32 * span, cy - span});
  v.push_back({cx + 32 * span, cy - span});
  v.push_back({cx, cy + 32 * span});

  auto ccw = [&](Tri t) {
    if (orient2d(v[t.v[0]], v[t.v[1]], v[t.v[2]]) < 0) std::swap(t.v[1], t.v[2]);
    return t;
  };

  std::vector<Tri> tris{ccw({{n, n + 1, n + 2}})};

  for (int p = 0; p < n; ++p) {
    std::vector<Tri> keep;
    std::vector<std::pair<int, int>> boundary;  // directed cavity edges
    keep.reserve(tris.size());
    for (const auto& t : tris) {
      if (incircle(v[t.v[0]], v[t.v[1]], v[t.v[2]], v[p]) > 0) {
        boundary.emplace_back(t.v[0], t.v[1]);
        boundary.emplace_back(t.v[1], t.v[2]);
        boundary.emplace_back(t.v[2], t.v[0]);
      } else {
        keep.push_back(t);
      }
    }
    if (boundary.empty()) return {};  // duplicate or degenerate point
    // Edges shared by two bad triangles appear once in each direction; the
    // cavity hull is the set of edges whose reverse is absent.
    std::vector<std::pair<int, int>> hull;
    for (const auto& e : boundary) {
      auto rev = std::make_pair(e.second, e.first);
      if (std::find(boundary.begin(), boundary.end(), rev) == boundary.end()) {
        hull.push_back(e);
      }
    }
    tris = std::move(keep);
    for (const auto& [a, b] : hull) {
      if (std::abs(orient2d(v[a], v[b], v[p])) == 0.0) return {};  // collinear
      tris.push_back(ccw({{a, b, p}}));
    }
  }

  std::vector<Edge> edges;
  for (const auto& t : tris) {
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;  // touches super-triangle
    edges.push_back(make_edge(t.v[0], t.v[1]));
    edges.push_back(make_edge(t.v[1], t.v[2]));
    edges.push_back(make_edge(t.v[2], t.v[0]));
  }
  return normalize_edges(std::move(edges));
}

}  // namespace agentmesh

#include "kstab/polytope.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"

namespace kstab {

namespace {

Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (sgn(a[i]) != 0 && sgn(b[i]) != 0) s += a[i] * b[i];
  return s;
}

// Calls f(subset) for every k-subset of {0..n-1} in lexicographic order.
template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    f(std::as_const(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Rational twice_area(std::span<const Point> ring) {
  Rational twice = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % ring.size()];
    twice += p[0] * q[1] - p[1] * q[0];
  }
  return abs(twice);
}

}  // namespace

// Sorted counterclockwise around the centroid; exact comparisons.
std::vector<Point> polygon_ring(std::vector<Point> pts) {
  if (pts.empty()) return pts;
  Rational cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p[0];
    cy += p[1];
  }
  cx /= static_cast<long>(pts.size());
  cy /= static_cast<long>(pts.size());
  auto half = [&](const Point& p) {
    const Rational dx = p[0] - cx, dy = p[1] - cy;
    return (sgn(dy) > 0 || (sgn(dy) == 0 && sgn(dx) > 0)) ? 0 : 1;
  };
  std::sort(pts.begin(), pts.end(), [&](const Point& a, const Point& b) {
    const int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    const Rational cross = (a[0] - cx) * (b[1] - cy) - (a[1] - cy) * (b[0] - cx);
    return sgn(cross) > 0;
  });
  return pts;
}

// Sutherland–Hodgman clipping, exact.
Rational clipped_polygon_area(std::span<const Point> ring, std::span<const HalfSpace> cuts) {
  std::vector<Point> poly(ring.begin(), ring.end()), next;
  std::vector<Rational> f;
  for (const auto& h : cuts) {
    if (poly.size() < 3) return 0;
    f.resize(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) f[i] = h.normal[0] * poly[i][0] + h.normal[1] * poly[i][1] - h.offset;
    next.clear();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const std::size_t j = (i + 1) % poly.size();
      if (sgn(f[i]) >= 0) next.push_back(poly[i]);
      if ((sgn(f[i]) > 0 && sgn(f[j]) < 0) || (sgn(f[i]) < 0 && sgn(f[j]) > 0)) {
        const Rational s = f[i] / (f[i] - f[j]);
        next.push_back({poly[i][0] + s * (poly[j][0] - poly[i][0]), poly[i][1] + s * (poly[j][1] - poly[i][1])});
      }
    }
    std::swap(poly, next);
  }
  return poly.size() < 3 ? Rational(0) : twice_area(poly);
}

int affine_dimension(std::span<const Point> points) {
  if (points.empty()) return -1;
  RationalMatrix diffs;
  for (std::size_t i = 1; i < points.size(); ++i) {
    std::vector<Rational> row(points[i].size());
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = points[i][j] - points[0][j];
    diffs.push_back(std::move(row));
  }
  return static_cast<int>(rank(std::move(diffs)));
}

Polytope::Polytope(std::size_t dim, std::vector<HalfSpace> halfspaces)
    : dim_(dim), halfspaces_(std::move(halfspaces)) {
  for (const auto& h : halfspaces_)
    if (h.normal.size() != dim_) throw GeometryError("half-space normal has the wrong dimension");

  std::set<Point> found;
  for_each_subset(halfspaces_.size(), dim_, [&](const std::vector<std::size_t>& idx) {
    RationalMatrix a;
    std::vector<Rational> b;
    for (std::size_t i : idx) {
      a.push_back(halfspaces_[i].normal);
      b.push_back(halfspaces_[i].offset);
    }
    auto x = solve(std::move(a), std::move(b));
    if (!x || found.count(*x)) return;
    if (contains(*x)) found.insert(std::move(*x));
  });
  vertices_.assign(found.begin(), found.end());
}

bool Polytope::contains(std::span<const Rational> m) const {
  for (const auto& h : halfspaces_)
    if (dot(h.normal, m) < h.offset) return false;
  return true;
}

std::pair<Rational, Rational> Polytope::range(std::span<const Rational> w) const {
  if (vertices_.empty()) throw GeometryError("range over an empty polytope");
  Rational lo = dot(w, vertices_[0]), hi = lo;
  for (std::size_t i = 1; i < vertices_.size(); ++i) {
    const Rational v = dot(w, vertices_[i]);
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  return {lo, hi};
}

Rational Polytope::normalized_volume() const {
  if (vertices_.size() <= dim_) return 0;
  if (dim_ == 1) {
    auto [lo, hi] = std::minmax_element(vertices_.begin(), vertices_.end(),
                                        [](const Point& a, const Point& b) { return a[0] < b[0]; });
    return (*hi)[0] - (*lo)[0];
  }
  if (dim_ == 2) {
    if (affine_dimension(vertices_) < 2) return 0;
    return twice_area(polygon_ring(vertices_));
  }
  if (affine_dimension(vertices_) < static_cast<int>(dim_)) return 0;

  // Pulling triangulation through the face lattice: cone each facet not containing the apex
  // over the apex, recursively.
  const std::size_t nv = vertices_.size();
  std::vector<std::vector<bool>> tight(halfspaces_.size(), std::vector<bool>(nv));
  for (std::size_t h = 0; h < halfspaces_.size(); ++h)
    for (std::size_t v = 0; v < nv; ++v)
      tight[h][v] = dot(halfspaces_[h].normal, vertices_[v]) == halfspaces_[h].offset;

  auto face_dim = [&](const std::vector<std::size_t>& ids) {
    std::vector<Point> pts;
    for (std::size_t i : ids) pts.push_back(vertices_[i]);
    return affine_dimension(pts);
  };

  Rational total = 0;
  std::vector<std::size_t> chain;
  auto recurse = [&](auto&& self, const std::vector<std::size_t>& face, int d) -> void {
    if (d == 0) {
      chain.push_back(face[0]);
      RationalMatrix m;
      for (std::size_t i = 1; i < chain.size(); ++i) {
        std::vector<Rational> row(dim_);
        for (std::size_t j = 0; j < dim_; ++j) row[j] = vertices_[chain[i]][j] - vertices_[chain[0]][j];
        m.push_back(std::move(row));
      }
      total += abs(determinant(std::move(m)));
      chain.pop_back();
      return;
    }
    const std::size_t apex = face[0];
    std::set<std::vector<std::size_t>> facets;
    for (std::size_t h = 0; h < halfspaces_.size(); ++h) {
      std::vector<std::size_t> sub;
      for (std::size_t v : face)
        if (tight[h][v]) sub.push_back(v);
      if (sub.size() < static_cast<std::size_t>(d) || sub.size() == face.size() || tight[h][apex]) continue;
      if (face_dim(sub) == d - 1) facets.insert(std::move(sub));
    }
    chain.push_back(apex);
    for (const auto& f : facets) self(self, f, d - 1);
    chain.pop_back();
  };
  std::vector<std::size_t> all(nv);
  for (std::size_t i = 0; i < nv; ++i) all[i] = i;
  recurse(recurse, all, static_cast<int>(dim_));
  return total;
}

}  // namespace kstab

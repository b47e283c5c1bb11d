#pragma once

#include <span>
#include <utility>
#include <vector>

#include "kstab/rational.hpp"

namespace kstab {

/// ⟨normal, m⟩ ≥ offset.
struct HalfSpace {
  std::vector<Rational> normal;
  Rational offset;
};

using Point = std::vector<Rational>;

/// A bounded rational polyhedron in H-representation with exactly enumerated vertices.
/// Callers guarantee boundedness.
class Polytope {
 public:
  Polytope(std::size_t dim, std::vector<HalfSpace> halfspaces);

  std::size_t ambient_dimension() const noexcept { return dim_; }
  const std::vector<HalfSpace>& halfspaces() const noexcept { return halfspaces_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  bool empty() const noexcept { return vertices_.empty(); }
  bool contains(std::span<const Rational> m) const;

  /// n!·(Euclidean volume); 0 when the polytope is not full-dimensional.
  Rational normalized_volume() const;

  /// (min, max) of ⟨w, ·⟩ over the polytope. Throws GeometryError when empty.
  std::pair<Rational, Rational> range(std::span<const Rational> w) const;

 private:
  std::size_t dim_;
  std::vector<HalfSpace> halfspaces_;
  std::vector<Point> vertices_;
};

/// Affine dimension of a point set (−1 for the empty set).
int affine_dimension(std::span<const Point> points);

/// Vertices of a convex polygon in counterclockwise order.
std::vector<Point> polygon_ring(std::vector<Point> vertices);

/// Twice the area of a convex polygon (given as a ring) intersected with the half-planes `cuts`.
Rational clipped_polygon_area(std::span<const Point> ring, std::span<const HalfSpace> cuts);

}  // namespace kstab

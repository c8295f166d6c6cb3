#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "avgshadow/spaces.hpp"

namespace avgshadow {

/// One cell of a cover. `index` holds grid coordinates per axis (for Σ₂ the
/// single entry is the cylinder word read as a binary number, first symbol
/// most significant). `radius` is the half-width per axis; for Σ₂ cylinders
/// of length r it is the cylinder diameter 2^-r.
struct Box {
  std::vector<std::size_t> index;
  std::vector<double> lower;
  double radius = 0.0;
};

/// Disjoint cover of a space by boxes: uniform half-open grids (last box
/// closed, circle grid wraps), grid cells meeting a convex plane region,
/// prefix cylinders of Σ₂, single sites of a discrete space, and cartesian
/// products of those.
class BoxCover {
 public:
  class Impl;

  BoxCover(const Space& space, std::size_t resolution);

  const Space& space() const { return space_; }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const;
  const Box& box(std::size_t id) const;
  const std::vector<Box>& boxes() const;

  /// Id of the unique box containing `p`; throws invalid_argument when the
  /// point is outside the covered space.
  std::size_t locate(const Point& p) const;

  Point center(std::size_t id) const;

  /// Largest distance from the center to a point of the box.
  double covering_radius(std::size_t id) const;

  /// Center, corners, then seeded random members: `count` points in total,
  /// all inside the space. Depends only on (box, count, seed).
  std::vector<Point> samples(std::size_t id, std::size_t count, std::uint64_t seed) const;

  /// Superset of the boxes whose center lies within `radius` of `q`.
  std::vector<std::size_t> near(const Point& q, double radius) const;

 private:
  Space space_;
  std::size_t resolution_;
  std::shared_ptr<const Impl> impl_;
};

/// Convenience spelling of the cover constructor; throws on resolution 0.
BoxCover box_cover(const Space& space, std::size_t resolution);

}  // namespace avgshadow

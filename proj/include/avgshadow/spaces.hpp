#pragma once

// Metric spaces hosting the iterated function systems: the unit (or any
// compact) interval, the circle R/Z, convex plane regions, the one-sided
// binary sequence space, finite discrete spaces, and max-metric products.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "avgshadow/rng.hpp"

namespace avgshadow {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

/// A point of a finite discrete space.
struct Site {
  std::uint32_t index = 0;
  friend bool operator==(const Site&, const Site&) = default;
};

using Bit = std::uint8_t;

/// Eventually periodic binary sequence prefix · cycle^∞, kept in canonical
/// form (shortest preperiod, primitive cycle) so that equal sequences compare
/// equal structurally.
class BinarySequence {
 public:
  BinarySequence(std::vector<Bit> prefix, std::vector<Bit> cycle);

  static BinarySequence constant(Bit bit);

  Bit at(std::size_t i) const;
  const std::vector<Bit>& prefix() const { return prefix_; }
  const std::vector<Bit>& cycle() const { return cycle_; }

  /// word · s, with word[0] becoming the new first symbol.
  BinarySequence prepend(std::span<const Bit> word) const;
  /// The shifted sequence s_1 s_2 ...
  BinarySequence drop_front() const;
  BinarySequence with_flipped(std::size_t position) const;

  /// Zero-based index of the first disagreement, or nullopt when equal.
  std::optional<std::size_t> first_difference(const BinarySequence& other) const;

  /// "0110(01)": prefix followed by the parenthesized cycle.
  std::string to_string() const;
  static BinarySequence parse(std::string_view text);

  friend bool operator==(const BinarySequence&, const BinarySequence&) = default;

 private:
  void canonicalize();

  std::vector<Bit> prefix_;
  std::vector<Bit> cycle_;
};

enum class PointKind { scalar, planar, site, sequence, pair };

/// Tagged point value. Interval and circle points are scalars (circle
/// coordinates live in [0,1)); Σ₂ points and product pairs are shared and
/// immutable.
class Point {
 public:
  Point() : value_(0.0) {}

  static Point scalar(double x) { return Point(Value(x)); }
  static Point planar(double x, double y) { return Point(Value(Vec2{x, y})); }
  static Point planar(Vec2 v) { return Point(Value(v)); }
  static Point site(std::uint32_t index) { return Point(Value(Site{index})); }
  static Point sequence(BinarySequence s);
  static Point pair(Point first, Point second);

  PointKind kind() const { return static_cast<PointKind>(value_.index()); }

  double as_scalar() const;
  Vec2 as_vec() const;
  Site as_site() const;
  const BinarySequence& as_sequence() const;
  const Point& first() const;
  const Point& second() const;

  friend bool operator==(const Point& a, const Point& b);

 private:
  using PairPtr = std::shared_ptr<const std::pair<Point, Point>>;
  using SequencePtr = std::shared_ptr<const BinarySequence>;
  using Value = std::variant<double, Vec2, Site, SequencePtr, PairPtr>;

  explicit Point(Value v) : value_(std::move(v)) {}

  Value value_;
};

enum class SpaceKind { interval, circle, plane, sigma2, discrete, product };

const char* to_string(SpaceKind kind) noexcept;

/// Descriptor of one metric space. Immutable; copies share factor data.
class Space {
 public:
  static Space interval(double lo = 0.0, double hi = 1.0);
  static Space circle();
  /// Convex polygon; vertices in either orientation.
  static Space plane(std::vector<Vec2> polygon);
  static Space rectangle(Vec2 lo, Vec2 hi);
  static Space sigma2();
  static Space discrete(std::uint32_t sites);
  static Space product(const Space& first, const Space& second);

  SpaceKind kind() const { return kind_; }

  double lower() const { return lo_; }
  double upper() const { return hi_; }
  const std::vector<Vec2>& polygon() const { return polygon_; }
  Vec2 box_min() const { return box_min_; }
  Vec2 box_max() const { return box_max_; }
  std::uint32_t sites() const { return sites_; }
  const Space& first() const;
  const Space& second() const;

  std::string describe() const;

  friend bool operator==(const Space& a, const Space& b);

 private:
  Space() = default;

  SpaceKind kind_ = SpaceKind::interval;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<Vec2> polygon_;
  Vec2 box_min_;
  Vec2 box_max_;
  std::uint32_t sites_ = 0;
  std::shared_ptr<const std::pair<Space, Space>> factors_;
};

/// Metric of the space. Throws space_mismatch when a point does not have the
/// shape the space expects.
double distance(const Space& space, const Point& p, const Point& q);

/// Exact diameter: interval length, 1/2 for the circle, 1 for Σ₂, the
/// bounding-rectangle diagonal for plane regions, max of factors for products.
double diameter(const Space& space);

bool contains(const Space& space, const Point& p, double tolerance = 1e-12);

/// Throws space_mismatch unless `p` has the shape of `space`.
void check_shape(const Space& space, const Point& p);

/// Reduce a real number to the circle coordinate in [0,1).
double wrap_unit(double x);

Point random_point(const Space& space, Rng& rng);

/// A point of `space` at distance at most `radius` from `p`. Moves the full
/// radius whenever the space allows it.
Point perturb(const Space& space, const Point& p, double radius, Rng& rng);

/// Nearest point of the region (plane spaces); identity for members.
Vec2 project_to_region(const Space& plane, Vec2 p);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);
/// Throws parse_error unless the whole text is one number.
double parse_double(std::string_view text);

std::string format_point(const Space& space, const Point& p);
Point parse_point(const Space& space, std::string_view text);

}  // namespace avgshadow

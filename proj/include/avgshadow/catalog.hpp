#pragma once

// Ready-made systems: finite permutation systems, the Sierpiński IFS, the
// minimal affine pair, the Σ₂ prepend shift, and two circle systems built from
// piecewise-quadratic homeomorphisms of [0,1].

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avgshadow/ifs.hpp"

namespace avgshadow {

enum class ExampleKind {
  finite_set,
  sierpinski,
  minimal_pair,
  sigma2_shift,
  circle_counterexample,
  circle_halfpoint,
};

struct ExampleDescriptor {
  ExampleKind kind = ExampleKind::sierpinski;
  double parameter = 0.0;  // n, α or a, depending on kind

  static ExampleDescriptor finite_set(std::uint32_t n) { return {ExampleKind::finite_set, double(n)}; }
  static ExampleDescriptor sierpinski() { return {ExampleKind::sierpinski, 0.0}; }
  static ExampleDescriptor minimal_pair(double alpha) { return {ExampleKind::minimal_pair, alpha}; }
  static ExampleDescriptor sigma2_shift() { return {ExampleKind::sigma2_shift, 0.0}; }
  static ExampleDescriptor circle_counterexample(double a) {
    return {ExampleKind::circle_counterexample, a};
  }
  static ExampleDescriptor circle_halfpoint() { return {ExampleKind::circle_halfpoint, 0.0}; }

  /// Parse a catalog name plus key=value parameters (n, alpha, a).
  static ExampleDescriptor parse(const std::string& name,
                                 const std::map<std::string, double>& params);

  std::string name() const;
  std::string parameters() const;
};

struct ExampleInfo {
  ExampleDescriptor descriptor;
  std::string name;
  std::string parameters;
  std::string space;
  std::string expected_asp;
  std::optional<double> beta;
  std::string fixed_points;
};

/// The six catalog entries with default parameters.
std::vector<ExampleInfo> list_examples();

ExampleInfo describe(const ExampleDescriptor& example);

/// Throws invalid_argument for parameters outside the declared ranges.
IFSystem make(const ExampleDescriptor& example);

/// Circle-example lifts on [0,1]; which = 0 for the first map, 1 for the second.
double counterexample_lift(int which, double a, double t);
double halfpoint_lift(int which, double t);

/// Invariant interval of the minimal affine pair, obtained by iterating the
/// hull of the Hutchinson image of [0,1] and widening until invariant.
std::pair<double, double> minimal_pair_domain(double alpha);

inline const Vec2 sierpinski_apex{0.5, 0.86602540378443864676};

/// Fraction of the boxes of box_cover(space, resolution) visited by a random
/// composition sequence from `start` (after a short burn-in).
double minimality_probe(const IFSystem& ifs, const Point& start, std::size_t iterations,
                        std::size_t resolution, std::uint64_t seed);

}  // namespace avgshadow

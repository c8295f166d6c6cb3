#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "avgshadow/pseudo_orbits.hpp"

namespace avgshadow {

/// Distances between a true orbit z_i = F_{σ_i}(z) and a target sequence,
/// with running averages S_n = (1/n) Σ_{i<n} d(z_i, x_i) for n = 1 … horizon.
/// `tail` is the maximum of S_n over the final window, the finite-horizon
/// stand-in for the limsup.
struct ShadowReport {
  Point shadow;
  SymbolWord symbols;
  std::size_t horizon = 0;
  std::vector<Point> trajectory;
  std::vector<double> distances;
  std::vector<double> profile;
  double window = 0.1;
  double tail = 0.0;

  // Populated by constructive_shadow only.
  std::optional<double> beta;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::vector<double> bounds;             // per-step bound on d(x_i, y_i)
  std::vector<double> cumulative_bounds;  // bound on Σ_{i<n} d(x_i, y_i)

  double average() const { return profile.empty() ? 0.0 : profile.back(); }
};

constexpr double default_window = 0.1;

/// S_n for n = 1 … distances.size(), with compensated summation.
std::vector<double> running_averages(std::span<const double> distances);

/// First n (1-based) of the final window: max(1, ⌈(1-w)·H⌉).
std::size_t tail_window_start(std::size_t horizon, double window);
double tail_statistic(std::span<const double> profile, double window);

/// α_{i-1} + β α_{i-2} + … + β^{i-1} α_0 + β^i M; i = 0 gives M.
double error_bound(std::span<const double> alpha, double beta, double M, std::size_t i);

/// Shadow a δ-average pseudo-orbit of a uniformly contracting system, with
/// δ = (1-β)ε/2: start at y_0 = x_0 and follow the orbit's own symbols.
/// Throws precondition_failed if the system has no analytic ratio or the
/// orbit does not validate at δ in average mode.
ShadowReport constructive_shadow(const IFSystem& ifs, const PseudoOrbit& orbit, double epsilon,
                                 double window = default_window);

ShadowReport average_distance_profile(const IFSystem& ifs, const Point& z,
                                      const SymbolStream& stream, std::span<const Point> targets,
                                      double window = default_window);
ShadowReport average_distance_profile(const IFSystem& ifs, const Point& z,
                                      const SymbolStream& stream, const PseudoOrbit& orbit,
                                      double window = default_window);

/// Tail statistic only, without materializing the trajectory.
double tail_average_distance(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                             std::span<const Point> targets, double window = default_window);

/// Profile of the decimated comparison d(z_{k·i}, x_i) for i < targets.size(),
/// taken from a trajectory of the refined system.
ShadowReport decimated_profile(const ShadowReport& refined, std::span<const Point> targets,
                               std::size_t k, const Space& space, double window = default_window);

struct SearchStrategy {
  enum class Kind { exhaustive, greedy };
  Kind kind = Kind::greedy;
  std::size_t word_length = 0;

  static SearchStrategy exhaustive(std::size_t h) { return {Kind::exhaustive, h}; }
  static SearchStrategy greedy() { return {Kind::greedy, 0}; }
};

constexpr std::size_t exhaustive_budget = 1'000'000;

/// Oracle: minimize the horizon average over candidates × symbol choices.
/// Exhaustive enumerates every word of length h, extended periodically;
/// greedy steers each step toward the next orbit point. Ties go to the
/// lexicographically first (candidate, word).
ShadowReport brute_force_search(const IFSystem& ifs, const PseudoOrbit& orbit,
                                std::span<const Point> candidates, SearchStrategy strategy,
                                std::size_t horizon);

struct PlainVerdict {
  bool shadows = false;
  double max_deviation = 0.0;
};

PlainVerdict plain_shadow_check(const IFSystem& ifs, const PseudoOrbit& orbit, const Point& z,
                                const SymbolStream& stream, double epsilon);

/// Whether the orbit of z under σ settles within `tolerance` of b or c.
struct ClaimOutcome {
  std::optional<std::size_t> step;  // first step within tolerance
  int limit = -1;                   // 0: b, 1: c
  double final_distance = 0.0;
};

ClaimOutcome convergence_claim(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                               const Point& b, const Point& c, double tolerance,
                               std::size_t max_steps);

}  // namespace avgshadow

#include "avgshadow/shadowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avgshadow/error.hpp"
#include "compensated_sum.hpp"

namespace avgshadow {

using detail::CompensatedSum;

std::vector<double> running_averages(std::span<const double> distances) {
  std::vector<double> out(distances.size());
  CompensatedSum acc;
  for (std::size_t n = 1; n <= distances.size(); ++n) {
    acc.add(distances[n - 1]);
    out[n - 1] = acc.value() / static_cast<double>(n);
  }
  return out;
}

std::size_t tail_window_start(std::size_t horizon, double window) {
  require(window > 0.0 && window <= 1.0, ErrorCode::invalid_argument, "window must lie in (0,1]");
  const auto start = static_cast<std::size_t>(std::ceil((1.0 - window) * static_cast<double>(horizon)));
  return std::max<std::size_t>(1, start);
}

double tail_statistic(std::span<const double> profile, double window) {
  if (profile.empty()) return 0.0;
  const std::size_t start = tail_window_start(profile.size(), window);
  double best = 0.0;
  for (std::size_t n = start; n <= profile.size(); ++n) best = std::max(best, profile[n - 1]);
  return best;
}

double error_bound(std::span<const double> alpha, double beta, double M, std::size_t i) {
  require(i <= alpha.size(), ErrorCode::invalid_argument, "bound index beyond the error ledger");
  double b = M;
  for (std::size_t j = 0; j < i; ++j) b = alpha[j] + beta * b;
  return b;
}

namespace {

void finish_profile(ShadowReport& report) {
  report.horizon = report.distances.size();
  report.profile = running_averages(report.distances);
  report.tail = tail_statistic(report.profile, report.window);
}

}  // namespace

ShadowReport constructive_shadow(const IFSystem& ifs, const PseudoOrbit& orbit, double epsilon,
                                 double window) {
  require(ifs.ratio().has_value() && *ifs.ratio() < 1.0, ErrorCode::precondition_failed,
          "constructive shadowing needs an analytic contraction ratio below 1");
  require(epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
  require(!orbit.points.empty(), ErrorCode::invalid_argument, "empty pseudo-orbit");
  const double beta = *ifs.ratio();
  const double delta = (1.0 - beta) * epsilon / 2.0;
  require(validate(orbit, delta, ValidationMode::average).passed(), ErrorCode::precondition_failed,
          "pseudo-orbit is not a delta-average pseudo-orbit at delta = " + format_double(delta));

  ShadowReport report;
  report.window = window;
  report.shadow = orbit.points.front();
  report.symbols = orbit.symbols;
  report.beta = beta;
  report.delta = delta;
  report.epsilon = epsilon;

  const double M = 0.0;  // y_0 = x_0
  const std::size_t H = orbit.points.size();
  report.trajectory.reserve(H);
  report.distances.reserve(H);
  report.bounds.reserve(H);
  report.cumulative_bounds.reserve(H);
  report.trajectory.push_back(report.shadow);
  for (std::size_t i = 0; i + 1 < H; ++i)
    report.trajectory.push_back(ifs.apply(orbit.symbols[i], report.trajectory.back()));

  double bound = M;
  CompensatedSum alpha_sum;
  for (std::size_t i = 0; i < H; ++i) {
    report.distances.push_back(distance(ifs.space(), orbit.points[i], report.trajectory[i]));
    if (i > 0) bound = orbit.errors[i - 1] + beta * bound;
    report.bounds.push_back(bound);
    // n = i + 1 compared points; the sum runs over α_0 … α_{n-2}.
    if (i > 0) alpha_sum.add(orbit.errors[i - 1]);
    report.cumulative_bounds.push_back((M + alpha_sum.value()) / (1.0 - beta));
  }
  finish_profile(report);
  return report;
}

ShadowReport average_distance_profile(const IFSystem& ifs, const Point& z,
                                      const SymbolStream& stream, std::span<const Point> targets,
                                      double window) {
  require(!targets.empty(), ErrorCode::invalid_argument, "empty target sequence");
  ShadowReport report;
  report.window = window;
  report.shadow = z;
  report.symbols = stream.take(targets.size() - 1);
  report.trajectory.reserve(targets.size());
  report.trajectory.push_back(z);
  for (Symbol s : report.symbols) report.trajectory.push_back(ifs.apply(s, report.trajectory.back()));
  report.distances.reserve(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i)
    report.distances.push_back(distance(ifs.space(), report.trajectory[i], targets[i]));
  finish_profile(report);
  return report;
}

ShadowReport average_distance_profile(const IFSystem& ifs, const Point& z,
                                      const SymbolStream& stream, const PseudoOrbit& orbit,
                                      double window) {
  return average_distance_profile(ifs, z, stream, orbit.points, window);
}

double tail_average_distance(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                             std::span<const Point> targets, double window) {
  require(!targets.empty(), ErrorCode::invalid_argument, "empty target sequence");
  const std::size_t H = targets.size();
  const std::size_t start = tail_window_start(H, window);
  const SymbolWord all = ifs.symbols();
  CompensatedSum acc;
  double best = 0.0;
  Point current = z;
  bool frozen = false;  // current is fixed by every map
  for (std::size_t n = 1; n <= H; ++n) {
    acc.add(distance(ifs.space(), current, targets[n - 1]));
    if (n >= start) best = std::max(best, acc.value() / static_cast<double>(n));
    if (n == H || frozen) continue;
    Point next = ifs.apply(stream.at(n - 1), current);
    if (next == current) {
      frozen = std::all_of(all.begin(), all.end(),
                           [&](Symbol s) { return ifs.apply(s, current) == current; });
    }
    current = std::move(next);
  }
  return best;
}

ShadowReport decimated_profile(const ShadowReport& refined, std::span<const Point> targets,
                               std::size_t k, const Space& space, double window) {
  require(k >= 1 && !targets.empty(), ErrorCode::invalid_argument, "decimation needs k >= 1 and targets");
  require(k * (targets.size() - 1) < refined.trajectory.size(), ErrorCode::invalid_argument,
          "refined trajectory too short for decimation");
  ShadowReport report;
  report.window = window;
  report.shadow = refined.shadow;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    report.trajectory.push_back(refined.trajectory[k * i]);
    report.distances.push_back(distance(space, report.trajectory.back(), targets[i]));
  }
  finish_profile(report);
  return report;
}

namespace {

double horizon_sum(const IFSystem& ifs, const Point& z, const PseudoOrbit& orbit,
                   std::size_t horizon, auto&& symbol_at) {
  CompensatedSum acc;
  Point current = z;
  for (std::size_t i = 0; i < horizon; ++i) {
    acc.add(distance(ifs.space(), current, orbit.points[i]));
    if (i + 1 < horizon) current = ifs.apply(symbol_at(i), current);
  }
  return acc.value();
}

}  // namespace

ShadowReport brute_force_search(const IFSystem& ifs, const PseudoOrbit& orbit,
                                std::span<const Point> candidates, SearchStrategy strategy,
                                std::size_t horizon) {
  require(!candidates.empty(), ErrorCode::invalid_argument, "no candidate points");
  require(horizon >= 1 && horizon <= orbit.points.size(), ErrorCode::invalid_argument,
          "search horizon must lie in [1, orbit length]");
  const std::size_t L = ifs.size();
  const std::span<const Point> targets(orbit.points.data(), horizon);

  if (strategy.kind == SearchStrategy::Kind::exhaustive) {
    const std::size_t h = strategy.word_length;
    require(h >= 1, ErrorCode::invalid_argument, "exhaustive search needs word length >= 1");
    double words = 1.0;
    for (std::size_t i = 0; i < h; ++i) words *= static_cast<double>(L);
    require(words <= static_cast<double>(exhaustive_budget), ErrorCode::budget_exceeded,
            "exhaustive search over " + format_double(words) + " words exceeds the budget");
    const auto count = static_cast<std::size_t>(words);
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_candidate = 0;
    SymbolWord best_word;
    SymbolWord word(h);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      for (std::size_t w = 0; w < count; ++w) {
        std::size_t v = w;
        for (std::size_t j = h; j-- > 0;) {
          word[j] = Symbol{static_cast<std::uint32_t>(v % L)};
          v /= L;
        }
        const double s = horizon_sum(ifs, candidates[c], orbit, horizon,
                                     [&](std::size_t i) { return word[i % h]; });
        if (s < best) {
          best = s;
          best_candidate = c;
          best_word = word;
        }
      }
    }
    return average_distance_profile(ifs, candidates[best_candidate],
                                    SymbolStream::periodic(best_word), targets);
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_candidate = 0;
  SymbolWord best_word;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    SymbolWord word;
    Point current = candidates[c];
    for (std::size_t i = 0; i + 1 < horizon; ++i) {
      Symbol pick{0};
      double closest = std::numeric_limits<double>::infinity();
      Point chosen;
      for (Symbol s : ifs.symbols()) {
        Point image = ifs.apply(s, current);
        const double d = distance(ifs.space(), image, orbit.points[i + 1]);
        if (d < closest) {
          closest = d;
          pick = s;
          chosen = std::move(image);
        }
      }
      word.push_back(pick);
      current = std::move(chosen);
    }
    const double s = horizon_sum(ifs, candidates[c], orbit, horizon,
                                 [&](std::size_t i) { return word[i]; });
    if (s < best) {
      best = s;
      best_candidate = c;
      best_word = std::move(word);
    }
  }
  return average_distance_profile(ifs, candidates[best_candidate],
                                  SymbolStream::explicit_list(best_word), targets);
}

PlainVerdict plain_shadow_check(const IFSystem& ifs, const PseudoOrbit& orbit, const Point& z,
                                const SymbolStream& stream, double epsilon) {
  PlainVerdict verdict;
  Point current = z;
  for (std::size_t n = 0; n < orbit.points.size(); ++n) {
    verdict.max_deviation = std::max(verdict.max_deviation, distance(ifs.space(), orbit.points[n], current));
    if (n + 1 < orbit.points.size()) current = ifs.apply(stream.at(n), current);
  }
  verdict.shadows = verdict.max_deviation <= epsilon;
  return verdict;
}

ClaimOutcome convergence_claim(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                               const Point& b, const Point& c, double tolerance,
                               std::size_t max_steps) {
  ClaimOutcome out;
  Point current = z;
  for (std::size_t n = 0;; ++n) {
    const double db = distance(ifs.space(), current, b);
    const double dc = distance(ifs.space(), current, c);
    out.final_distance = std::min(db, dc);
    if (db <= tolerance || dc <= tolerance) {
      out.step = n;
      out.limit = db <= dc ? 0 : 1;
      return out;
    }
    if (n == max_steps) return out;
    current = ifs.apply(stream.at(n), current);
  }
}

}  // namespace avgshadow

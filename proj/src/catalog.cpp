#include "avgshadow/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avgshadow/box_cover.hpp"
#include "avgshadow/error.hpp"

namespace avgshadow {

namespace {

constexpr double sqrt3_over_4 = 0.43301270189221932338;

const char* kind_name(ExampleKind kind) {
  switch (kind) {
    case ExampleKind::finite_set: return "finite_set";
    case ExampleKind::sierpinski: return "sierpinski";
    case ExampleKind::minimal_pair: return "minimal_pair";
    case ExampleKind::sigma2_shift: return "sigma2_shift";
    case ExampleKind::circle_counterexample: return "circle_counterexample";
    case ExampleKind::circle_halfpoint: return "circle_halfpoint";
  }
  return "unknown";
}

void check_parameters(const ExampleDescriptor& e) {
  switch (e.kind) {
    case ExampleKind::finite_set:
      require(e.parameter >= 1 && e.parameter <= 4 && e.parameter == std::floor(e.parameter),
              ErrorCode::invalid_argument, "finite_set needs an integer n in [1,4]");
      return;
    case ExampleKind::minimal_pair:
      require(e.parameter > 0.0 && e.parameter < 0.25, ErrorCode::invalid_argument,
              "minimal_pair needs 0 < alpha < 1/4");
      return;
    case ExampleKind::circle_counterexample:
      require(e.parameter > 0.0 && e.parameter < 1.0, ErrorCode::invalid_argument,
              "circle_counterexample needs 0 < a < 1");
      return;
    default: return;
  }
}

// Inverse of an increasing function on [lo,hi] by bisection.
double invert_increasing(const auto& f, double s, double lo, double hi) {
  for (int i = 0; i < 200 && lo < hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) < s) lo = mid;
    else hi = mid;
  }
  return std::fabs(f(lo) - s) <= std::fabs(f(hi) - s) ? lo : hi;
}

// Smaller root of t² − p·t + q = 0, written to avoid cancellation.
double small_root(double p, double q) {
  const double disc = std::max(0.0, p * p - 4.0 * q);
  return 2.0 * q / (p + std::sqrt(disc));
}

using Lift = double (*)(double a, double t);

double cx_first(double a, double t) { return t <= a ? t + (a - t) * t : t + (1.0 - t) * (t - a); }
double cx_second(double a, double t) {
  return t <= a ? t + (a - t) * t * t : t + (1.0 - t * t) * (t - a);
}

double cx_first_inverse(double a, double s) {
  return s <= a ? small_root(1.0 + a, s) : small_root(2.0 + a, a + s);
}
double cx_second_inverse(double a, double s) {
  auto f = [a](double t) { return cx_second(a, t); };
  return s <= a ? invert_increasing(f, s, 0.0, a) : invert_increasing(f, s, a, 1.0);
}

double hp_first(double t) { return t <= 0.5 ? t + (0.5 - t) * t : t - (t - 0.5) * (1.0 - t); }
double hp_second(double t) { return t <= 0.5 ? t + (0.5 - t) * t : t + (1.0 - t) * (t - 0.5); }

double hp_first_inverse(double s) {
  if (s <= 0.5) return small_root(1.5, s);
  return 0.5 * (0.5 + std::sqrt(std::max(0.0, 4.0 * s - 1.75)));
}
double hp_second_inverse(double s) {
  return s <= 0.5 ? small_root(1.5, s) : small_root(2.5, 0.5 + s);
}

MapSpec circle_map(std::string label, std::function<double(double)> lift,
                   std::function<double(double)> inverse) {
  MapSpec m;
  m.label = std::move(label);
  m.forward = [lift](const Point& p) { return Point::scalar(wrap_unit(lift(p.as_scalar()))); };
  m.inverse = [inverse](const Point& p) -> std::optional<Point> {
    return Point::scalar(wrap_unit(inverse(p.as_scalar())));
  };
  return m;
}

IFSystem make_sierpinski() {
  const Space triangle = Space::plane({{0.0, 0.0}, {1.0, 0.0}, sierpinski_apex});
  const Vec2 shifts[3] = {{0.0, 0.0}, {0.5, 0.0}, {0.25, sqrt3_over_4}};
  std::vector<MapSpec> maps;
  for (int k = 0; k < 3; ++k) {
    const Vec2 b = shifts[k];
    MapSpec m;
    m.label = "f" + std::to_string(k + 1);
    m.forward = [b](const Point& p) {
      const Vec2 v = p.as_vec();
      return Point::planar(0.5 * v.x + b.x, 0.5 * v.y + b.y);
    };
    m.inverse = [b, triangle](const Point& p) -> std::optional<Point> {
      const Vec2 v = p.as_vec();
      const Point q = Point::planar(2.0 * (v.x - b.x), 2.0 * (v.y - b.y));
      if (!contains(triangle, q, 1e-12)) return std::nullopt;
      return Point::planar(project_to_region(triangle, q.as_vec()));
    };
    maps.push_back(std::move(m));
  }
  return IFSystem("sierpinski", triangle, std::move(maps), 0.5);
}

IFSystem make_minimal_pair(double alpha) {
  const double r = 0.5 + 2.0 * alpha;
  const auto [lo, hi] = minimal_pair_domain(alpha);
  const double offsets[2] = {-alpha, 0.5 - alpha};
  std::vector<MapSpec> maps;
  for (int k = 0; k < 2; ++k) {
    const double c = offsets[k];
    MapSpec m;
    m.label = "f" + std::to_string(k + 1);
    m.forward = [r, c](const Point& p) { return Point::scalar(r * p.as_scalar() + c); };
    m.inverse = [r, c, lo, hi](const Point& p) -> std::optional<Point> {
      const double x = (p.as_scalar() - c) / r;
      if (x < lo - 1e-12 || x > hi + 1e-12) return std::nullopt;
      return Point::scalar(std::clamp(x, lo, hi));
    };
    maps.push_back(std::move(m));
  }
  return IFSystem("minimal_pair", Space::interval(lo, hi), std::move(maps), r);
}

IFSystem make_sigma2_shift() {
  std::vector<MapSpec> maps;
  for (Bit b : {Bit{0}, Bit{1}}) {
    MapSpec m;
    m.label = "f" + std::to_string(b);
    m.prepend = std::vector<Bit>{b};
    m.forward = [b](const Point& p) {
      const Bit word[1] = {b};
      return Point::sequence(p.as_sequence().prepend(word));
    };
    m.inverse = [b](const Point& p) -> std::optional<Point> {
      const BinarySequence& s = p.as_sequence();
      if (s.at(0) != b) return std::nullopt;
      return Point::sequence(s.drop_front());
    };
    maps.push_back(std::move(m));
  }
  return IFSystem("sigma2_shift", Space::sigma2(), std::move(maps), 0.5);
}

IFSystem make_finite_set(std::uint32_t n) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  std::vector<MapSpec> maps;
  do {
    std::vector<std::uint32_t> inverse(n);
    std::string label = "p";
    for (std::uint32_t i = 0; i < n; ++i) {
      inverse[perm[i]] = i;
      label += std::to_string(perm[i]);
    }
    MapSpec m;
    m.label = label;
    m.forward = [perm](const Point& p) { return Point::site(perm.at(p.as_site().index)); };
    m.inverse = [inverse](const Point& p) -> std::optional<Point> {
      return Point::site(inverse.at(p.as_site().index));
    };
    maps.push_back(std::move(m));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return IFSystem("finite_set", Space::discrete(n), std::move(maps), 1.0);
}

}  // namespace

double counterexample_lift(int which, double a, double t) {
  return which == 0 ? cx_first(a, t) : cx_second(a, t);
}

double halfpoint_lift(int which, double t) { return which == 0 ? hp_first(t) : hp_second(t); }

std::pair<double, double> minimal_pair_domain(double alpha) {
  require(alpha > 0.0 && alpha < 0.25, ErrorCode::invalid_argument, "minimal_pair needs 0 < alpha < 1/4");
  const double r = 0.5 + 2.0 * alpha;
  auto image = [&](double lo, double hi) {
    // Both maps are increasing, so the hull of the image is given by the ends.
    return std::pair{r * lo - alpha, r * hi + 0.5 - alpha};
  };
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 10000; ++i) {
    const auto [a, b] = image(lo, hi);
    const bool settled = std::fabs(a - lo) < 1e-13 && std::fabs(b - hi) < 1e-13;
    lo = a;
    hi = b;
    if (settled) break;
  }
  // Widen until the floating-point images stay inside.
  for (int i = 0; i < 1000; ++i) {
    const auto [a, b] = image(lo, hi);
    if (a >= lo && b <= hi) break;
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  return {lo, hi};
}

ExampleDescriptor ExampleDescriptor::parse(const std::string& name,
                                           const std::map<std::string, double>& params) {
  auto only = [&](const std::string& key, double fallback) {
    for (const auto& [k, v] : params)
      require(k == key, ErrorCode::invalid_argument, "unknown parameter '" + k + "' for " + name);
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  auto none = [&] {
    require(params.empty(), ErrorCode::invalid_argument, name + " takes no parameters");
  };
  ExampleDescriptor e;
  if (name == "finite_set") {
    e = {ExampleKind::finite_set, only("n", 3)};
  } else if (name == "sierpinski") {
    none();
    e = sierpinski();
  } else if (name == "minimal_pair") {
    e = {ExampleKind::minimal_pair, only("alpha", 0.125)};
  } else if (name == "sigma2_shift") {
    none();
    e = sigma2_shift();
  } else if (name == "circle_counterexample") {
    e = {ExampleKind::circle_counterexample, only("a", 0.5)};
  } else if (name == "circle_halfpoint") {
    none();
    e = circle_halfpoint();
  } else {
    throw Error(ErrorCode::invalid_argument, "unknown example '" + name + "'");
  }
  check_parameters(e);
  return e;
}

std::string ExampleDescriptor::name() const { return kind_name(kind); }

std::string ExampleDescriptor::parameters() const {
  switch (kind) {
    case ExampleKind::finite_set: return "n=" + format_double(parameter);
    case ExampleKind::minimal_pair: return "alpha=" + format_double(parameter);
    case ExampleKind::circle_counterexample: return "a=" + format_double(parameter);
    default: return "";
  }
}

ExampleInfo describe(const ExampleDescriptor& example) {
  check_parameters(example);
  ExampleInfo info;
  info.descriptor = example;
  info.name = example.name();
  info.parameters = example.parameters();
  const double p = example.parameter;
  switch (example.kind) {
    case ExampleKind::finite_set:
      info.space = "discrete(" + format_double(p) + ")";
      info.expected_asp = "yes";
      info.beta = 1.0;
      info.fixed_points = "every site (identity map)";
      break;
    case ExampleKind::sierpinski:
      info.space = "triangle (0,0) (1,0) (1/2,sqrt3/2)";
      info.expected_asp = "yes";
      info.beta = 0.5;
      info.fixed_points = "f1:(0,0) f2:(1,0) f3:(1/2,sqrt3/2)";
      break;
    case ExampleKind::minimal_pair: {
      const auto [lo, hi] = minimal_pair_domain(p);
      info.space = "interval[" + format_double(lo) + "," + format_double(hi) + "]";
      info.expected_asp = "yes";
      info.beta = 0.5 + 2.0 * p;
      info.fixed_points = "f1:" + format_double(-p / (0.5 - 2.0 * p)) +
                          " f2:" + format_double((0.5 - p) / (0.5 - 2.0 * p));
      break;
    }
    case ExampleKind::sigma2_shift:
      info.space = "sigma2";
      info.expected_asp = "yes";
      info.beta = 0.5;
      info.fixed_points = "f0:(0) f1:(1)";
      break;
    case ExampleKind::circle_counterexample:
      info.space = "circle";
      info.expected_asp = "no";
      info.fixed_points = "0 and " + format_double(p) + " (common)";
      break;
    case ExampleKind::circle_halfpoint:
      info.space = "circle";
      info.expected_asp = "not stated";
      info.fixed_points = "0 and 0.5 (common)";
      break;
  }
  return info;
}

std::vector<ExampleInfo> list_examples() {
  return {describe(ExampleDescriptor::finite_set(3)),
          describe(ExampleDescriptor::sierpinski()),
          describe(ExampleDescriptor::minimal_pair(0.125)),
          describe(ExampleDescriptor::sigma2_shift()),
          describe(ExampleDescriptor::circle_counterexample(0.5)),
          describe(ExampleDescriptor::circle_halfpoint())};
}

IFSystem make(const ExampleDescriptor& example) {
  check_parameters(example);
  switch (example.kind) {
    case ExampleKind::finite_set: return make_finite_set(static_cast<std::uint32_t>(example.parameter));
    case ExampleKind::sierpinski: return make_sierpinski();
    case ExampleKind::minimal_pair: return make_minimal_pair(example.parameter);
    case ExampleKind::sigma2_shift: return make_sigma2_shift();
    case ExampleKind::circle_counterexample: {
      const double a = example.parameter;
      std::vector<MapSpec> maps;
      maps.push_back(circle_map("F1", [a](double t) { return cx_first(a, t); },
                                [a](double s) { return cx_first_inverse(a, s); }));
      maps.push_back(circle_map("F2", [a](double t) { return cx_second(a, t); },
                                [a](double s) { return cx_second_inverse(a, s); }));
      return IFSystem("circle_counterexample", Space::circle(), std::move(maps));
    }
    case ExampleKind::circle_halfpoint: {
      std::vector<MapSpec> maps;
      maps.push_back(circle_map("F1", hp_first, hp_first_inverse));
      maps.push_back(circle_map("F2", hp_second, hp_second_inverse));
      return IFSystem("circle_halfpoint", Space::circle(), std::move(maps));
    }
  }
  throw Error(ErrorCode::invalid_argument, "unknown example kind");
}

double minimality_probe(const IFSystem& ifs, const Point& start, std::size_t iterations,
                        std::size_t resolution, std::uint64_t seed) {
  require(iterations >= 1, ErrorCode::invalid_argument, "probe needs iterations >= 1");
  const BoxCover cover(ifs.space(), resolution);
  std::vector<std::uint8_t> seen(cover.size(), 0);
  Rng rng(seed);
  constexpr std::size_t burn_in = 100;
  Point x = start;
  for (std::size_t i = 0; i < burn_in; ++i)
    x = ifs.apply(Symbol{static_cast<std::uint32_t>(rng.below(ifs.size()))}, x);
  std::size_t visited = 0;
  for (std::size_t i = 0; i < iterations; ++i) {
    x = ifs.apply(Symbol{static_cast<std::uint32_t>(rng.below(ifs.size()))}, x);
    std::uint8_t& mark = seen[cover.locate(x)];
    visited += !mark;
    mark = 1;
  }
  return static_cast<double>(visited) / static_cast<double>(cover.size());
}

}  // namespace avgshadow

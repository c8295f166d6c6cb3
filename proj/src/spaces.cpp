#include "avgshadow/spaces.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "avgshadow/error.hpp"

namespace avgshadow {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::space_mismatch: return "space_mismatch";
    case ErrorCode::unknown_symbol: return "unknown_symbol";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::precondition_failed: return "precondition_failed";
    case ErrorCode::preimage_unavailable: return "preimage_unavailable";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// BinarySequence

BinarySequence::BinarySequence(std::vector<Bit> prefix, std::vector<Bit> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  canonicalize();
}

BinarySequence BinarySequence::constant(Bit bit) { return BinarySequence({}, {bit}); }

void BinarySequence::canonicalize() {
  require(!cycle_.empty(), ErrorCode::invalid_argument, "binary sequence needs a nonempty cycle");
  auto is_bit = [](Bit b) { return b <= 1; };
  require(std::all_of(prefix_.begin(), prefix_.end(), is_bit) &&
              std::all_of(cycle_.begin(), cycle_.end(), is_bit),
          ErrorCode::invalid_argument, "binary sequence symbols must be 0 or 1");

  const std::size_t n = cycle_.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = cycle_[i] == cycle_[i - p];
    if (periodic) {
      cycle_.resize(p);
      break;
    }
  }
  while (!prefix_.empty() && prefix_.back() == cycle_.back()) {
    prefix_.pop_back();
    std::rotate(cycle_.begin(), cycle_.end() - 1, cycle_.end());
  }
}

Bit BinarySequence::at(std::size_t i) const {
  if (i < prefix_.size()) return prefix_[i];
  return cycle_[(i - prefix_.size()) % cycle_.size()];
}

BinarySequence BinarySequence::prepend(std::span<const Bit> word) const {
  std::vector<Bit> prefix;
  prefix.reserve(word.size() + prefix_.size());
  prefix.insert(prefix.end(), word.begin(), word.end());
  prefix.insert(prefix.end(), prefix_.begin(), prefix_.end());
  return BinarySequence(std::move(prefix), cycle_);
}

BinarySequence BinarySequence::drop_front() const {
  if (!prefix_.empty()) return BinarySequence({prefix_.begin() + 1, prefix_.end()}, cycle_);
  std::vector<Bit> cycle = cycle_;
  std::rotate(cycle.begin(), cycle.begin() + 1, cycle.end());
  return BinarySequence({}, std::move(cycle));
}

BinarySequence BinarySequence::with_flipped(std::size_t position) const {
  const std::size_t length = std::max(position + 1, prefix_.size());
  std::vector<Bit> prefix(length);
  for (std::size_t i = 0; i < length; ++i) prefix[i] = at(i);
  prefix[position] ^= 1;
  std::vector<Bit> cycle = cycle_;
  const std::size_t phase = (length - prefix_.size()) % cycle.size();
  std::rotate(cycle.begin(), cycle.begin() + static_cast<std::ptrdiff_t>(phase), cycle.end());
  return BinarySequence(std::move(prefix), std::move(cycle));
}

std::optional<std::size_t> BinarySequence::first_difference(const BinarySequence& other) const {
  const std::size_t bound = std::max(prefix_.size(), other.prefix_.size()) +
                            std::lcm(cycle_.size(), other.cycle_.size());
  for (std::size_t i = 0; i < bound; ++i) {
    if (at(i) != other.at(i)) return i;
  }
  return std::nullopt;
}

std::string BinarySequence::to_string() const {
  std::string out;
  out.reserve(prefix_.size() + cycle_.size() + 2);
  for (Bit b : prefix_) out.push_back(char('0' + b));
  out.push_back('(');
  for (Bit b : cycle_) out.push_back(char('0' + b));
  out.push_back(')');
  return out;
}

BinarySequence BinarySequence::parse(std::string_view text) {
  const auto open = text.find('(');
  require(open != std::string_view::npos && text.size() >= open + 3 && text.back() == ')',
          ErrorCode::parse_error, "binary sequence must look like 0110(01): " + std::string(text));
  auto bits = [&](std::string_view part) {
    std::vector<Bit> out;
    for (char ch : part) {
      require(ch == '0' || ch == '1', ErrorCode::parse_error,
              "binary sequence digit expected: " + std::string(text));
      out.push_back(Bit(ch - '0'));
    }
    return out;
  };
  return BinarySequence(bits(text.substr(0, open)),
                        bits(text.substr(open + 1, text.size() - open - 2)));
}

// ---------------------------------------------------------------------------
// Point

Point Point::sequence(BinarySequence s) {
  return Point(Value(std::make_shared<const BinarySequence>(std::move(s))));
}

Point Point::pair(Point first, Point second) {
  return Point(Value(std::make_shared<const std::pair<Point, Point>>(std::move(first),
                                                                     std::move(second))));
}

namespace {

[[noreturn]] void shape_error(const char* expected) {
  throw Error(ErrorCode::space_mismatch, std::string("point is not ") + expected);
}

}  // namespace

double Point::as_scalar() const {
  if (const double* x = std::get_if<double>(&value_)) return *x;
  shape_error("a scalar");
}

Vec2 Point::as_vec() const {
  if (const Vec2* v = std::get_if<Vec2>(&value_)) return *v;
  shape_error("a planar point");
}

Site Point::as_site() const {
  if (const Site* s = std::get_if<Site>(&value_)) return *s;
  shape_error("a site");
}

const BinarySequence& Point::as_sequence() const {
  if (const SequencePtr* s = std::get_if<SequencePtr>(&value_)) return **s;
  shape_error("a binary sequence");
}

const Point& Point::first() const {
  if (const PairPtr* p = std::get_if<PairPtr>(&value_)) return (*p)->first;
  shape_error("a pair");
}

const Point& Point::second() const {
  if (const PairPtr* p = std::get_if<PairPtr>(&value_)) return (*p)->second;
  shape_error("a pair");
}

bool operator==(const Point& a, const Point& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case PointKind::scalar: return a.as_scalar() == b.as_scalar();
    case PointKind::planar: return a.as_vec() == b.as_vec();
    case PointKind::site: return a.as_site() == b.as_site();
    case PointKind::sequence: return a.as_sequence() == b.as_sequence();
    case PointKind::pair: return a.first() == b.first() && a.second() == b.second();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Space

const char* to_string(SpaceKind kind) noexcept {
  switch (kind) {
    case SpaceKind::interval: return "interval";
    case SpaceKind::circle: return "circle";
    case SpaceKind::plane: return "plane";
    case SpaceKind::sigma2: return "sigma2";
    case SpaceKind::discrete: return "discrete";
    case SpaceKind::product: return "product";
  }
  return "unknown";
}

namespace {

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

}  // namespace

Space Space::interval(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, ErrorCode::invalid_argument,
          "interval needs finite lo < hi");
  Space s;
  s.kind_ = SpaceKind::interval;
  s.lo_ = lo;
  s.hi_ = hi;
  return s;
}

Space Space::circle() {
  Space s;
  s.kind_ = SpaceKind::circle;
  return s;
}

Space Space::plane(std::vector<Vec2> polygon) {
  require(polygon.size() >= 3, ErrorCode::invalid_argument, "plane region needs >= 3 vertices");
  double area2 = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[(i + 1) % polygon.size()];
    area2 += a.x * b.y - b.x * a.y;
  }
  require(area2 != 0.0, ErrorCode::invalid_argument, "plane region is degenerate");
  if (area2 < 0.0) std::reverse(polygon.begin(), polygon.end());
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    require(cross(polygon[i], polygon[(i + 1) % n], polygon[(i + 2) % n]) >= -1e-12,
            ErrorCode::invalid_argument, "plane region must be convex");
  }
  Space s;
  s.kind_ = SpaceKind::plane;
  s.box_min_ = s.box_max_ = polygon.front();
  for (Vec2 v : polygon) {
    s.box_min_ = {std::min(s.box_min_.x, v.x), std::min(s.box_min_.y, v.y)};
    s.box_max_ = {std::max(s.box_max_.x, v.x), std::max(s.box_max_.y, v.y)};
  }
  s.polygon_ = std::move(polygon);
  return s;
}

Space Space::rectangle(Vec2 lo, Vec2 hi) {
  return plane({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

Space Space::sigma2() {
  Space s;
  s.kind_ = SpaceKind::sigma2;
  return s;
}

Space Space::discrete(std::uint32_t sites) {
  require(sites >= 1, ErrorCode::invalid_argument, "discrete space needs at least one site");
  Space s;
  s.kind_ = SpaceKind::discrete;
  s.sites_ = sites;
  return s;
}

Space Space::product(const Space& first, const Space& second) {
  Space s;
  s.kind_ = SpaceKind::product;
  s.factors_ = std::make_shared<const std::pair<Space, Space>>(first, second);
  return s;
}

const Space& Space::first() const {
  require(kind_ == SpaceKind::product, ErrorCode::space_mismatch, "space is not a product");
  return factors_->first;
}

const Space& Space::second() const {
  require(kind_ == SpaceKind::product, ErrorCode::space_mismatch, "space is not a product");
  return factors_->second;
}

std::string Space::describe() const {
  switch (kind_) {
    case SpaceKind::interval:
      return "interval[" + format_double(lo_) + "," + format_double(hi_) + "]";
    case SpaceKind::circle: return "circle";
    case SpaceKind::plane: {
      std::string out = "plane[";
      for (std::size_t i = 0; i < polygon_.size(); ++i) {
        if (i) out += ' ';
        out += format_double(polygon_[i].x) + ";" + format_double(polygon_[i].y);
      }
      return out + "]";
    }
    case SpaceKind::sigma2: return "sigma2";
    case SpaceKind::discrete: return "discrete(" + std::to_string(sites_) + ")";
    case SpaceKind::product:
      return "product(" + factors_->first.describe() + "," + factors_->second.describe() + ")";
  }
  return "unknown";
}

bool operator==(const Space& a, const Space& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case SpaceKind::interval: return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    case SpaceKind::circle:
    case SpaceKind::sigma2: return true;
    case SpaceKind::plane: return a.polygon_ == b.polygon_;
    case SpaceKind::discrete: return a.sites_ == b.sites_;
    case SpaceKind::product:
      return a.factors_->first == b.factors_->first && a.factors_->second == b.factors_->second;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Metric operations

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;  // x slightly below an integer
  return r;
}

double distance(const Space& space, const Point& p, const Point& q) {
  switch (space.kind()) {
    case SpaceKind::interval: return std::fabs(p.as_scalar() - q.as_scalar());
    case SpaceKind::circle: {
      const double d = wrap_unit(std::fabs(p.as_scalar() - q.as_scalar()));
      return std::min(d, 1.0 - d);
    }
    case SpaceKind::plane: {
      const Vec2 a = p.as_vec();
      const Vec2 b = q.as_vec();
      return std::hypot(a.x - b.x, a.y - b.y);
    }
    case SpaceKind::sigma2: {
      const auto k = p.as_sequence().first_difference(q.as_sequence());
      return k ? std::ldexp(1.0, -static_cast<int>(*k)) : 0.0;
    }
    case SpaceKind::discrete: return p.as_site() == q.as_site() ? 0.0 : 1.0;
    case SpaceKind::product:
      return std::max(distance(space.first(), p.first(), q.first()),
                      distance(space.second(), p.second(), q.second()));
  }
  return 0.0;
}

double diameter(const Space& space) {
  switch (space.kind()) {
    case SpaceKind::interval: return space.upper() - space.lower();
    case SpaceKind::circle: return 0.5;
    case SpaceKind::plane: {
      const Vec2 lo = space.box_min();
      const Vec2 hi = space.box_max();
      return std::hypot(hi.x - lo.x, hi.y - lo.y);
    }
    case SpaceKind::sigma2: return 1.0;
    case SpaceKind::discrete: return space.sites() > 1 ? 1.0 : 0.0;
    case SpaceKind::product: return std::max(diameter(space.first()), diameter(space.second()));
  }
  return 0.0;
}

void check_shape(const Space& space, const Point& p) {
  switch (space.kind()) {
    case SpaceKind::interval:
    case SpaceKind::circle: (void)p.as_scalar(); return;
    case SpaceKind::plane: (void)p.as_vec(); return;
    case SpaceKind::sigma2: (void)p.as_sequence(); return;
    case SpaceKind::discrete:
      require(p.as_site().index < space.sites(), ErrorCode::space_mismatch,
              "site index outside the discrete space");
      return;
    case SpaceKind::product:
      check_shape(space.first(), p.first());
      check_shape(space.second(), p.second());
      return;
  }
}

namespace {

bool in_polygon(const std::vector<Vec2>& poly, Vec2 p, double tolerance) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % n];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    if (cross(a, b, p) < -tolerance * len) return false;
  }
  return true;
}

}  // namespace

bool contains(const Space& space, const Point& p, double tolerance) {
  try {
    switch (space.kind()) {
      case SpaceKind::interval: {
        const double x = p.as_scalar();
        return x >= space.lower() - tolerance && x <= space.upper() + tolerance;
      }
      case SpaceKind::circle: {
        const double x = p.as_scalar();
        return x >= 0.0 && x < 1.0;
      }
      case SpaceKind::plane: return in_polygon(space.polygon(), p.as_vec(), tolerance);
      case SpaceKind::sigma2: (void)p.as_sequence(); return true;
      case SpaceKind::discrete: return p.as_site().index < space.sites();
      case SpaceKind::product:
        return contains(space.first(), p.first(), tolerance) &&
               contains(space.second(), p.second(), tolerance);
    }
  } catch (const Error&) {
    return false;
  }
  return false;
}

Vec2 project_to_region(const Space& plane, Vec2 p) {
  require(plane.kind() == SpaceKind::plane, ErrorCode::space_mismatch,
          "projection needs a plane region");
  const auto& poly = plane.polygon();
  if (in_polygon(poly, p, 0.0)) return p;
  Vec2 best = poly.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 a = poly[i];
    const Vec2 b = poly[(i + 1) % poly.size()];
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    double t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 c{a.x + t * dx, a.y + t * dy};
    const double d = std::hypot(p.x - c.x, p.y - c.y);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

Point random_point(const Space& space, Rng& rng) {
  switch (space.kind()) {
    case SpaceKind::interval: return Point::scalar(rng.uniform(space.lower(), space.upper()));
    case SpaceKind::circle: return Point::scalar(rng.uniform());
    case SpaceKind::plane: {
      const Vec2 lo = space.box_min();
      const Vec2 hi = space.box_max();
      for (int attempt = 0; attempt < 10000; ++attempt) {
        const Vec2 v{rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)};
        if (in_polygon(space.polygon(), v, 0.0)) return Point::planar(v);
      }
      return Point::planar(project_to_region(space, {rng.uniform(lo.x, hi.x), rng.uniform(lo.y, hi.y)}));
    }
    case SpaceKind::sigma2: {
      std::vector<Bit> prefix(rng.below(13));
      for (Bit& b : prefix) b = Bit(rng.coin());
      std::vector<Bit> cycle(1 + rng.below(4));
      for (Bit& b : cycle) b = Bit(rng.coin());
      return Point::sequence(BinarySequence(std::move(prefix), std::move(cycle)));
    }
    case SpaceKind::discrete: return Point::site(std::uint32_t(rng.below(space.sites())));
    case SpaceKind::product: {
      Point a = random_point(space.first(), rng);
      Point b = random_point(space.second(), rng);
      return Point::pair(std::move(a), std::move(b));
    }
  }
  return {};
}

Point perturb(const Space& space, const Point& p, double radius, Rng& rng) {
  check_shape(space, p);
  if (!(radius > 0.0)) return p;
  switch (space.kind()) {
    case SpaceKind::interval: {
      const double x = p.as_scalar();
      const double sign = rng.coin() ? 1.0 : -1.0;
      for (double s : {sign, -sign}) {
        const double y = x + s * radius;
        if (y >= space.lower() && y <= space.upper()) return Point::scalar(y);
      }
      const double lo_gap = x - space.lower();
      const double hi_gap = space.upper() - x;
      return Point::scalar(lo_gap > hi_gap ? space.lower() : space.upper());
    }
    case SpaceKind::circle: {
      const double r = std::min(radius, 0.5);
      return Point::scalar(wrap_unit(p.as_scalar() + (rng.coin() ? r : -r)));
    }
    case SpaceKind::plane: {
      const Vec2 x = project_to_region(space, p.as_vec());
      Vec2 dir{1.0, 0.0};
      for (int attempt = 0; attempt < 16; ++attempt) {
        const double theta = rng.uniform(0.0, 2.0 * M_PI);
        dir = {std::cos(theta), std::sin(theta)};
        const Vec2 y{x.x + radius * dir.x, x.y + radius * dir.y};
        if (in_polygon(space.polygon(), y, 0.0)) return Point::planar(y);
      }
      double lo = 0.0;
      double hi = radius;
      for (int iter = 0; iter < 60; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (in_polygon(space.polygon(), {x.x + mid * dir.x, x.y + mid * dir.y}, 0.0))
          lo = mid;
        else
          hi = mid;
      }
      return Point::planar(x.x + lo * dir.x, x.y + lo * dir.y);
    }
    case SpaceKind::sigma2: {
      int k = 0;
      if (radius < 1.0) {
        k = static_cast<int>(std::ceil(std::log2(1.0 / radius)));
        while (std::ldexp(1.0, -k) > radius) ++k;
      }
      return Point::sequence(p.as_sequence().with_flipped(static_cast<std::size_t>(k)));
    }
    case SpaceKind::discrete: {
      if (radius < 1.0 || space.sites() < 2) return p;
      const std::uint32_t shift = 1 + std::uint32_t(rng.below(space.sites() - 1));
      return Point::site((p.as_site().index + shift) % space.sites());
    }
    case SpaceKind::product: {
      Point a = perturb(space.first(), p.first(), radius, rng);
      Point b = perturb(space.second(), p.second(), radius, rng);
      return Point::pair(std::move(a), std::move(b));
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Text forms

std::string format_double(double x) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), x);
  return std::string(buffer, result.ptr);
}

double parse_double(std::string_view text) {
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  require(result.ec == std::errc() && result.ptr == text.data() + text.size(),
          ErrorCode::parse_error, "not a number: '" + std::string(text) + "'");
  return value;
}

std::string format_point(const Space& space, const Point& p) {
  switch (space.kind()) {
    case SpaceKind::interval:
    case SpaceKind::circle: return format_double(p.as_scalar());
    case SpaceKind::plane: {
      const Vec2 v = p.as_vec();
      return format_double(v.x) + ";" + format_double(v.y);
    }
    case SpaceKind::sigma2: return p.as_sequence().to_string();
    case SpaceKind::discrete: return std::to_string(p.as_site().index);
    case SpaceKind::product:
      return "[" + format_point(space.first(), p.first()) + "|" +
             format_point(space.second(), p.second()) + "]";
  }
  return {};
}

Point parse_point(const Space& space, std::string_view text) {
  switch (space.kind()) {
    case SpaceKind::interval:
    case SpaceKind::circle: return Point::scalar(parse_double(text));
    case SpaceKind::plane: {
      const auto sep = text.find(';');
      require(sep != std::string_view::npos, ErrorCode::parse_error,
              "planar point must be x;y: " + std::string(text));
      return Point::planar(parse_double(text.substr(0, sep)), parse_double(text.substr(sep + 1)));
    }
    case SpaceKind::sigma2: return Point::sequence(BinarySequence::parse(text));
    case SpaceKind::discrete: {
      const double v = parse_double(text);
      require(v >= 0 && v == std::floor(v) && v < space.sites(), ErrorCode::parse_error,
              "site index out of range: " + std::string(text));
      return Point::site(static_cast<std::uint32_t>(v));
    }
    case SpaceKind::product: {
      require(text.size() >= 3 && text.front() == '[' && text.back() == ']',
              ErrorCode::parse_error, "product point must be [a|b]: " + std::string(text));
      const std::string_view inner = text.substr(1, text.size() - 2);
      int depth = 0;
      for (std::size_t i = 0; i < inner.size(); ++i) {
        if (inner[i] == '[') ++depth;
        if (inner[i] == ']') --depth;
        if (inner[i] == '|' && depth == 0) {
          return Point::pair(parse_point(space.first(), inner.substr(0, i)),
                             parse_point(space.second(), inner.substr(i + 1)));
        }
      }
      throw Error(ErrorCode::parse_error, "product point without separator: " + std::string(text));
    }
  }
  return {};
}

}  // namespace avgshadow

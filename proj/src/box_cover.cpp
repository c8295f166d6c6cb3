#include "avgshadow/box_cover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avgshadow/error.hpp"

namespace avgshadow {

class BoxCover::Impl {
 public:
  virtual ~Impl() = default;

  virtual std::size_t locate(const Point& p) const = 0;
  virtual Point center(std::size_t id) const = 0;
  virtual double covering_radius(std::size_t id) const = 0;
  /// Deterministic members of the closed box other than the center.
  virtual std::vector<Point> extremes(std::size_t id) const = 0;
  virtual std::optional<Point> random_member(std::size_t id, Rng& rng) const = 0;
  virtual void near(const Point& q, double radius, std::vector<std::size_t>& out) const = 0;

  std::vector<Box> boxes;
};

namespace {

using Impl = BoxCover::Impl;

std::size_t clamp_index(double t, std::size_t n) {
  if (!(t > 0.0)) return 0;
  if (t >= static_cast<double>(n)) return n - 1;
  return static_cast<std::size_t>(t);
}

// Uniform grid on [lo,hi]: half-open cells, last closed. Circles wrap.
class LineCover final : public Impl {
 public:
  LineCover(double lo, double hi, std::size_t n, bool wraps)
      : lo_(lo), hi_(hi), width_((hi - lo) / static_cast<double>(n)), n_(n), wraps_(wraps) {
    boxes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      boxes[i].index = {i};
      boxes[i].lower = {lower(i)};
      boxes[i].radius = width_ / 2;
    }
  }

  double lower(std::size_t i) const { return lo_ + width_ * static_cast<double>(i); }

  std::size_t locate(const Point& p) const override {
    double x = p.as_scalar();
    if (wraps_) x = wrap_unit(x);
    require(x >= lo_ && x <= hi_, ErrorCode::invalid_argument, "point outside the covered interval");
    std::size_t i = clamp_index((x - lo_) / width_, n_);
    // Nudge against the stored corners so locate agrees with the half-open boxes.
    while (i > 0 && x < boxes[i].lower[0]) --i;
    while (i + 1 < n_ && x >= boxes[i + 1].lower[0]) ++i;
    return i;
  }

  Point center(std::size_t id) const override {
    return Point::scalar(lower(id) + width_ / 2);
  }

  double covering_radius(std::size_t) const override { return width_ / 2; }

  std::vector<Point> extremes(std::size_t id) const override {
    double upper = id + 1 == n_ ? hi_ : lower(id + 1);
    if (wraps_) upper = wrap_unit(upper);
    return {Point::scalar(lower(id)), Point::scalar(upper)};
  }

  std::optional<Point> random_member(std::size_t id, Rng& rng) const override {
    return Point::scalar(std::min(lower(id) + width_ * rng.uniform(), wraps_ ? std::nextafter(1.0, 0.0) : hi_));
  }

  void near(const Point& q, double radius, std::vector<std::size_t>& out) const override {
    double x = q.as_scalar();
    if (wraps_) x = wrap_unit(x);
    if (wraps_ && 2 * radius + 2 * width_ >= 1.0) {
      for (std::size_t i = 0; i < n_; ++i) out.push_back(i);
      return;
    }
    const double from = std::floor((x - radius - lo_) / width_ - 0.5) - 1;
    const double to = std::ceil((x + radius - lo_) / width_ - 0.5) + 1;
    if (!wraps_) {
      const auto a = static_cast<std::size_t>(std::max(0.0, from));
      const double b = std::min(to, static_cast<double>(n_ - 1));
      for (std::size_t i = a; static_cast<double>(i) <= b; ++i) out.push_back(i);
      return;
    }
    const auto n = static_cast<long long>(n_);
    for (auto i = static_cast<long long>(from); i <= static_cast<long long>(to); ++i)
      out.push_back(static_cast<std::size_t>(((i % n) + n) % n));
  }

 private:
  double lo_;
  double hi_;
  double width_;
  std::size_t n_;
  bool wraps_;
};

double cross(Vec2 o, Vec2 a, Vec2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Sutherland–Hodgman clip of a convex polygon against an axis-aligned cell.
std::vector<Vec2> clip_to_cell(std::vector<Vec2> poly, Vec2 lo, Vec2 hi) {
  auto clip = [&](auto inside, auto cut) {
    std::vector<Vec2> out;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 a = poly[i];
      const Vec2 b = poly[(i + 1) % poly.size()];
      const bool ia = inside(a);
      const bool ib = inside(b);
      if (ia) out.push_back(a);
      if (ia != ib) out.push_back(cut(a, b));
    }
    poly = std::move(out);
  };
  auto cut_x = [](double x) {
    return [x](Vec2 a, Vec2 b) { return Vec2{x, a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)}; };
  };
  auto cut_y = [](double y) {
    return [y](Vec2 a, Vec2 b) { return Vec2{a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y), y}; };
  };
  clip([&](Vec2 p) { return p.x >= lo.x; }, cut_x(lo.x));
  if (!poly.empty()) clip([&](Vec2 p) { return p.x <= hi.x; }, cut_x(hi.x));
  if (!poly.empty()) clip([&](Vec2 p) { return p.y >= lo.y; }, cut_y(lo.y));
  if (!poly.empty()) clip([&](Vec2 p) { return p.y <= hi.y; }, cut_y(hi.y));
  return poly;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 q = poly[(i + 1) % poly.size()];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2;
}

Vec2 polygon_centroid(const std::vector<Vec2>& poly) {
  const Vec2 o = poly.front();
  double area = 0.0;
  Vec2 acc{};
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const double t = cross(o, poly[i], poly[i + 1]) / 2;
    area += t;
    acc.x += t * (o.x + poly[i].x + poly[i + 1].x) / 3;
    acc.y += t * (o.y + poly[i].y + poly[i + 1].y) / 3;
  }
  return {acc.x / area, acc.y / area};
}

// Grid cells of the bounding rectangle that meet the region in positive area.
class PlaneCover final : public Impl {
 public:
  PlaneCover(const Space& space, std::size_t n)
      : space_(space), lo_(space.box_min()), n_(n), cell_(n * n, -1) {
    const Vec2 hi = space.box_max();
    wx_ = (hi.x - lo_.x) / static_cast<double>(n);
    wy_ = (hi.y - lo_.y) / static_cast<double>(n);
    const double min_area = 1e-12 * wx_ * wy_;
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 clo = corner(i, j);
        const Vec2 chi = corner(i + 1, j + 1);
        std::vector<Vec2> piece = clip_to_cell(space.polygon(), clo, chi);
        if (piece.size() < 3 || polygon_area(piece) <= min_area) continue;
        Cell c;
        c.center = polygon_centroid(piece);
        for (Vec2 v : piece)
          c.radius = std::max(c.radius, std::hypot(v.x - c.center.x, v.y - c.center.y));
        c.vertices = std::move(piece);
        cell_[j * n + i] = static_cast<long long>(cells_.size());
        cells_.push_back(std::move(c));
        Box box;
        box.index = {i, j};
        box.lower = {clo.x, clo.y};
        box.radius = std::max(wx_, wy_) / 2;
        boxes.push_back(std::move(box));
      }
    }
  }

  std::size_t locate(const Point& p) const override {
    const Vec2 v = p.as_vec();
    require(contains(space_, p), ErrorCode::invalid_argument, "point outside the plane region");
    const std::size_t i = clamp_index((v.x - lo_.x) / wx_, n_);
    const std::size_t j = clamp_index((v.y - lo_.y) / wy_, n_);
    // Boundary points of the region may fall in a dropped zero-area cell;
    // fall back to a neighbour whose closure holds them.
    for (std::size_t dj = 0; dj <= std::min<std::size_t>(j, 1); ++dj) {
      for (std::size_t di = 0; di <= std::min<std::size_t>(i, 1); ++di) {
        const long long id = cell_[(j - dj) * n_ + (i - di)];
        if (id < 0) continue;
        const Vec2 clo = corner(i - di, j - dj);
        const Vec2 chi = corner(i - di + 1, j - dj + 1);
        const double tx = 1e-9 * wx_;
        const double ty = 1e-9 * wy_;
        if (v.x >= clo.x - tx && v.x <= chi.x + tx && v.y >= clo.y - ty && v.y <= chi.y + ty)
          return static_cast<std::size_t>(id);
      }
    }
    throw Error(ErrorCode::invalid_argument, "point not covered by any plane box");
  }

  Point center(std::size_t id) const override { return Point::planar(cells_[id].center); }

  double covering_radius(std::size_t id) const override { return cells_[id].radius; }

  std::vector<Point> extremes(std::size_t id) const override {
    std::vector<Point> out;
    for (Vec2 v : cells_[id].vertices) {
      const Vec2 inside = project_to_region(space_, v);
      out.push_back(Point::planar(inside));
    }
    return out;
  }

  std::optional<Point> random_member(std::size_t id, Rng& rng) const override {
    const Box& b = boxes[id];
    for (int attempt = 0; attempt < 64; ++attempt) {
      const Point p = Point::planar(b.lower[0] + wx_ * rng.uniform(), b.lower[1] + wy_ * rng.uniform());
      if (contains(space_, p, 0.0)) return p;
    }
    return std::nullopt;
  }

  void near(const Point& q, double radius, std::vector<std::size_t>& out) const override {
    const Vec2 v = q.as_vec();
    auto range = [&](double x, double lo, double w) {
      const double a = std::floor((x - radius - lo) / w) - 1;
      const double b = std::ceil((x + radius - lo) / w) + 1;
      const auto from = static_cast<std::size_t>(std::clamp(a, 0.0, double(n_ - 1)));
      const auto to = static_cast<std::size_t>(std::clamp(b, 0.0, double(n_ - 1)));
      return std::pair{from, to};
    };
    const auto [i0, i1] = range(v.x, lo_.x, wx_);
    const auto [j0, j1] = range(v.y, lo_.y, wy_);
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i)
        if (const long long id = cell_[j * n_ + i]; id >= 0) out.push_back(static_cast<std::size_t>(id));
  }

 private:
  struct Cell {
    Vec2 center;
    double radius = 0.0;
    std::vector<Vec2> vertices;
  };

  Vec2 corner(std::size_t i, std::size_t j) const {
    const Vec2 hi = space_.box_max();
    return {i == n_ ? hi.x : lo_.x + wx_ * static_cast<double>(i),
            j == n_ ? hi.y : lo_.y + wy_ * static_cast<double>(j)};
  }

  Space space_;
  Vec2 lo_;
  double wx_ = 0.0;
  double wy_ = 0.0;
  std::size_t n_;
  std::vector<long long> cell_;
  std::vector<Cell> cells_;
};

constexpr std::size_t max_cylinder_length = 16;

// Prefix cylinders of length r; id = prefix read as a binary number.
class CylinderCover final : public Impl {
 public:
  explicit CylinderCover(std::size_t r) : r_(r) {
    require(r <= max_cylinder_length, ErrorCode::invalid_argument,
            "sigma2 cover supports cylinder length <= 16");
    const std::size_t n = std::size_t{1} << r;
    boxes.resize(n);
    for (std::size_t id = 0; id < n; ++id) {
      boxes[id].index = {id};
      boxes[id].lower = {};
      boxes[id].radius = std::ldexp(1.0, -static_cast<int>(r));
    }
  }

  std::vector<Bit> word(std::size_t id) const {
    std::vector<Bit> w(r_);
    for (std::size_t i = 0; i < r_; ++i) w[i] = Bit((id >> (r_ - 1 - i)) & 1);
    return w;
  }

  std::size_t locate(const Point& p) const override {
    const BinarySequence& s = p.as_sequence();
    std::size_t id = 0;
    for (std::size_t i = 0; i < r_; ++i) id = (id << 1) | s.at(i);
    return id;
  }

  Point center(std::size_t id) const override {
    return Point::sequence(BinarySequence(word(id), {0}));
  }

  double covering_radius(std::size_t) const override {
    return std::ldexp(1.0, -static_cast<int>(r_));
  }

  std::vector<Point> extremes(std::size_t id) const override {
    const auto w = word(id);
    return {Point::sequence(BinarySequence(w, {1})), Point::sequence(BinarySequence(w, {0, 1})),
            Point::sequence(BinarySequence(w, {1, 0}))};
  }

  std::optional<Point> random_member(std::size_t id, Rng& rng) const override {
    auto w = word(id);
    for (int i = 0; i < 8; ++i) w.push_back(Bit(rng.coin()));
    std::vector<Bit> cycle(1 + rng.below(4));
    for (Bit& b : cycle) b = Bit(rng.coin());
    return Point::sequence(BinarySequence(std::move(w), std::move(cycle)));
  }

  void near(const Point& q, double radius, std::vector<std::size_t>& out) const override {
    const std::size_t n = boxes.size();
    if (radius >= 1.0) {
      for (std::size_t i = 0; i < n; ++i) out.push_back(i);
      return;
    }
    // Centers within radius agree with q on the first m symbols.
    std::size_t m = 0;
    while (std::ldexp(1.0, -static_cast<int>(m)) > radius) ++m;
    if (m >= r_) {
      out.push_back(locate(q));
      return;
    }
    const std::size_t span = std::size_t{1} << (r_ - m);
    const std::size_t first = (locate(q) / span) * span;
    for (std::size_t i = 0; i < span; ++i) out.push_back(first + i);
  }

 private:
  std::size_t r_;
};

class SiteCover final : public Impl {
 public:
  explicit SiteCover(std::uint32_t sites) {
    boxes.resize(sites);
    for (std::uint32_t i = 0; i < sites; ++i) {
      boxes[i].index = {i};
      boxes[i].lower = {double(i)};
      boxes[i].radius = 0.0;
    }
  }

  std::size_t locate(const Point& p) const override {
    const std::uint32_t i = p.as_site().index;
    require(i < boxes.size(), ErrorCode::invalid_argument, "site outside the discrete space");
    return i;
  }
  Point center(std::size_t id) const override { return Point::site(std::uint32_t(id)); }
  double covering_radius(std::size_t) const override { return 0.0; }
  std::vector<Point> extremes(std::size_t) const override { return {}; }
  std::optional<Point> random_member(std::size_t id, Rng&) const override { return center(id); }

  void near(const Point& q, double radius, std::vector<std::size_t>& out) const override {
    if (radius >= 1.0) {
      for (std::size_t i = 0; i < boxes.size(); ++i) out.push_back(i);
    } else {
      out.push_back(locate(q));
    }
  }
};

std::unique_ptr<Impl> make_impl(const Space& space, std::size_t n);

class ProductCover final : public Impl {
 public:
  ProductCover(const Space& space, std::size_t n)
      : a_(make_impl(space.first(), n)), b_(make_impl(space.second(), n)) {
    const std::size_t nb = b_->boxes.size();
    boxes.resize(a_->boxes.size() * nb);
    for (std::size_t i = 0; i < a_->boxes.size(); ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        const Box& x = a_->boxes[i];
        const Box& y = b_->boxes[j];
        Box& box = boxes[i * nb + j];
        box.index = x.index;
        box.index.insert(box.index.end(), y.index.begin(), y.index.end());
        box.lower = x.lower;
        box.lower.insert(box.lower.end(), y.lower.begin(), y.lower.end());
        box.radius = std::max(x.radius, y.radius);
      }
    }
  }

  std::size_t locate(const Point& p) const override {
    return a_->locate(p.first()) * b_->boxes.size() + b_->locate(p.second());
  }

  Point center(std::size_t id) const override {
    const auto [i, j] = split(id);
    return Point::pair(a_->center(i), b_->center(j));
  }

  double covering_radius(std::size_t id) const override {
    const auto [i, j] = split(id);
    return std::max(a_->covering_radius(i), b_->covering_radius(j));
  }

  std::vector<Point> extremes(std::size_t id) const override {
    const auto [i, j] = split(id);
    std::vector<Point> xs = a_->extremes(i);
    std::vector<Point> ys = b_->extremes(j);
    xs.insert(xs.begin(), a_->center(i));
    ys.insert(ys.begin(), b_->center(j));
    std::vector<Point> out;
    for (std::size_t u = 0; u < xs.size(); ++u)
      for (std::size_t v = 0; v < ys.size(); ++v)
        if (u || v) out.push_back(Point::pair(xs[u], ys[v]));
    return out;
  }

  std::optional<Point> random_member(std::size_t id, Rng& rng) const override {
    const auto [i, j] = split(id);
    auto x = a_->random_member(i, rng);
    auto y = b_->random_member(j, rng);
    if (!x || !y) return std::nullopt;
    return Point::pair(*x, *y);
  }

  void near(const Point& q, double radius, std::vector<std::size_t>& out) const override {
    std::vector<std::size_t> xs;
    std::vector<std::size_t> ys;
    a_->near(q.first(), radius, xs);
    b_->near(q.second(), radius, ys);
    for (std::size_t i : xs)
      for (std::size_t j : ys) out.push_back(i * b_->boxes.size() + j);
  }

 private:
  std::pair<std::size_t, std::size_t> split(std::size_t id) const {
    const std::size_t nb = b_->boxes.size();
    return {id / nb, id % nb};
  }

  std::unique_ptr<Impl> a_;
  std::unique_ptr<Impl> b_;
};

std::unique_ptr<Impl> make_impl(const Space& space, std::size_t n) {
  switch (space.kind()) {
    case SpaceKind::interval: return std::make_unique<LineCover>(space.lower(), space.upper(), n, false);
    case SpaceKind::circle: return std::make_unique<LineCover>(0.0, 1.0, n, true);
    case SpaceKind::plane: return std::make_unique<PlaneCover>(space, n);
    case SpaceKind::sigma2: return std::make_unique<CylinderCover>(n);
    case SpaceKind::discrete: return std::make_unique<SiteCover>(space.sites());
    case SpaceKind::product: return std::make_unique<ProductCover>(space, n);
  }
  throw Error(ErrorCode::unsupported, "no cover for this space");
}

}  // namespace

BoxCover::BoxCover(const Space& space, std::size_t resolution)
    : space_(space), resolution_(resolution) {
  require(resolution >= 1, ErrorCode::invalid_argument, "box cover resolution must be positive");
  impl_ = make_impl(space, resolution);
}

std::size_t BoxCover::size() const { return impl_->boxes.size(); }
const Box& BoxCover::box(std::size_t id) const { return impl_->boxes.at(id); }
const std::vector<Box>& BoxCover::boxes() const { return impl_->boxes; }
std::size_t BoxCover::locate(const Point& p) const {
  check_shape(space_, p);
  return impl_->locate(p);
}
Point BoxCover::center(std::size_t id) const { return impl_->center(id); }
double BoxCover::covering_radius(std::size_t id) const { return impl_->covering_radius(id); }

std::vector<Point> BoxCover::samples(std::size_t id, std::size_t count, std::uint64_t seed) const {
  std::vector<Point> out;
  if (count == 0) return out;
  out.push_back(impl_->center(id));
  for (Point& p : impl_->extremes(id)) {
    if (out.size() >= count) break;
    out.push_back(std::move(p));
  }
  Rng rng(derive_seed(seed, id));
  while (out.size() < count) {
    auto p = impl_->random_member(id, rng);
    out.push_back(p ? std::move(*p) : out.front());
  }
  return out;
}

std::vector<std::size_t> BoxCover::near(const Point& q, double radius) const {
  std::vector<std::size_t> out;
  impl_->near(q, radius, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BoxCover box_cover(const Space& space, std::size_t resolution) {
  return BoxCover(space, resolution);
}

}  // namespace avgshadow

#include "avgshadow/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "avgshadow/error.hpp"

namespace avgshadow {

IFSystem::IFSystem(std::string name, Space space, std::vector<MapSpec> maps,
                   std::optional<double> ratio)
    : name_(std::move(name)), space_(std::move(space)), maps_(std::move(maps)), ratio_(ratio) {
  require(!maps_.empty(), ErrorCode::invalid_argument, "an IFS needs at least one map");
  std::set<std::string> seen;
  for (const MapSpec& m : maps_) {
    require(static_cast<bool>(m.forward), ErrorCode::invalid_argument, "map '" + m.label + "' has no body");
    require(seen.insert(m.label).second, ErrorCode::invalid_argument, "duplicate map label '" + m.label + "'");
  }
  if (ratio_) {
    require(*ratio_ >= 0.0 && std::isfinite(*ratio_), ErrorCode::invalid_argument,
            "contraction ratio must be finite and nonnegative");
  }
}

void IFSystem::check_symbol(Symbol s) const {
  require(s.value < maps_.size(), ErrorCode::unknown_symbol,
          "symbol " + std::to_string(s.value) + " not in the index set of " + name_);
}

const std::string& IFSystem::label(Symbol s) const {
  check_symbol(s);
  return maps_[s.value].label;
}

std::optional<Symbol> IFSystem::find(std::string_view label) const {
  for (std::size_t i = 0; i < maps_.size(); ++i)
    if (maps_[i].label == label) return Symbol{static_cast<std::uint32_t>(i)};
  return std::nullopt;
}

SymbolWord IFSystem::symbols() const {
  SymbolWord out(maps_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = Symbol{static_cast<std::uint32_t>(i)};
  return out;
}

const MapSpec& IFSystem::map(Symbol s) const {
  check_symbol(s);
  return maps_[s.value];
}

bool IFSystem::has_inverse(Symbol s) const { return static_cast<bool>(map(s).inverse); }

Point IFSystem::apply(Symbol s, const Point& p) const { return map(s).forward(p); }

std::optional<Point> IFSystem::preimage(Symbol s, const Point& p) const {
  const MapSpec& m = map(s);
  require(static_cast<bool>(m.inverse), ErrorCode::unsupported,
          "map '" + m.label + "' has no registered inverse");
  return m.inverse(p);
}

Point apply(const IFSystem& ifs, Symbol s, const Point& p) { return ifs.apply(s, p); }

Point compose_apply(const IFSystem& ifs, const SymbolWord& word, const Point& p) {
  Point x = p;
  for (Symbol s : word) x = ifs.apply(s, x);
  return x;
}

double sampled_ratio(const IFSystem& ifs, std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorCode::invalid_argument, "ratio estimate needs samples >= 1");
  Rng rng(seed);
  double best = 0.0;
  std::size_t distinct = 0;
  for (std::size_t n = 0; n < samples; ++n) {
    const Point x = random_point(ifs.space(), rng);
    const Point y = random_point(ifs.space(), rng);
    const double d = distance(ifs.space(), x, y);
    if (d <= 0.0) continue;
    ++distinct;
    for (Symbol s : ifs.symbols())
      best = std::max(best, distance(ifs.space(), ifs.apply(s, x), ifs.apply(s, y)) / d);
  }
  require(distinct > 0, ErrorCode::precondition_failed,
          "space produced no two distinct sample points");
  return best;
}

RatioEstimate contraction_ratio(const IFSystem& ifs, std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorCode::invalid_argument, "ratio estimate needs samples >= 1");
  if (ifs.ratio()) return {*ifs.ratio(), true, 0};
  return {sampled_ratio(ifs, samples, seed), false, samples};
}

bool maps_into_space(const IFSystem& ifs, std::size_t samples, std::uint64_t seed,
                     double tolerance) {
  Rng rng(seed);
  for (std::size_t n = 0; n < samples; ++n) {
    const Point x = random_point(ifs.space(), rng);
    for (Symbol s : ifs.symbols())
      if (!contains(ifs.space(), ifs.apply(s, x), tolerance)) return false;
  }
  return true;
}

IFSystem product_ifs(const IFSystem& F, const IFSystem& G) {
  auto first = std::make_shared<const IFSystem>(F);
  auto second = std::make_shared<const IFSystem>(G);
  std::vector<MapSpec> maps;
  maps.reserve(F.size() * G.size());
  for (Symbol a : F.symbols()) {
    for (Symbol b : G.symbols()) {
      MapSpec m;
      m.label = "(" + F.label(a) + "," + G.label(b) + ")";
      m.forward = [first, second, a, b](const Point& p) {
        return Point::pair(first->apply(a, p.first()), second->apply(b, p.second()));
      };
      if (F.has_inverse(a) && G.has_inverse(b)) {
        m.inverse = [first, second, a, b](const Point& p) -> std::optional<Point> {
          auto x = first->preimage(a, p.first());
          auto y = second->preimage(b, p.second());
          if (!x || !y) return std::nullopt;
          return Point::pair(*x, *y);
        };
      }
      maps.push_back(std::move(m));
    }
  }
  std::optional<double> ratio;
  if (F.ratio() && G.ratio()) ratio = std::max(*F.ratio(), *G.ratio());
  IFSystem out(F.name() + "x" + G.name(), Space::product(F.space(), G.space()), std::move(maps), ratio);
  out.product_ = ProductStructure{first, second};
  return out;
}

std::pair<Symbol, Symbol> split_product_symbol(const IFSystem& product, Symbol s) {
  require(product.product().has_value(), ErrorCode::space_mismatch, "not a product system");
  product.check_symbol(s);
  const auto n = static_cast<std::uint32_t>(product.product()->second->size());
  return {Symbol{s.value / n}, Symbol{s.value % n}};
}

Symbol join_product_symbol(const IFSystem& product, Symbol first, Symbol second) {
  require(product.product().has_value(), ErrorCode::space_mismatch, "not a product system");
  product.product()->first->check_symbol(first);
  product.product()->second->check_symbol(second);
  const auto n = static_cast<std::uint32_t>(product.product()->second->size());
  return Symbol{first.value * n + second.value};
}

SymbolWord power_word(std::size_t base_size, std::size_t k, Symbol s) {
  SymbolWord w(k);
  std::uint64_t v = s.value;
  for (std::size_t j = k; j-- > 0;) {
    w[j] = Symbol{static_cast<std::uint32_t>(v % base_size)};
    v /= base_size;
  }
  require(v == 0, ErrorCode::unknown_symbol, "power symbol out of range");
  return w;
}

IFSystem power_ifs(const IFSystem& F, std::size_t k) {
  require(k >= 1, ErrorCode::invalid_argument, "power needs k >= 1");
  const double count = std::pow(static_cast<double>(F.size()), static_cast<double>(k));
  require(count <= 1 << 20, ErrorCode::budget_exceeded, "power system too large");
  auto base = std::make_shared<const IFSystem>(F);
  std::vector<MapSpec> maps;
  const auto n = static_cast<std::size_t>(count);
  maps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const SymbolWord word = power_word(F.size(), k, Symbol{static_cast<std::uint32_t>(i)});
    MapSpec m;
    // "f1.f0" reads as f1∘f0.
    for (std::size_t j = k; j-- > 0;) m.label += F.label(word[j]) + (j ? "." : "");
    m.forward = [base, word](const Point& p) { return compose_apply(*base, word, p); };
    const bool invertible = std::all_of(word.begin(), word.end(),
                                        [&](Symbol s) { return F.has_inverse(s); });
    if (invertible) {
      m.inverse = [base, word](const Point& p) -> std::optional<Point> {
        Point x = p;
        for (std::size_t j = word.size(); j-- > 0;) {
          auto prev = base->preimage(word[j], x);
          if (!prev) return std::nullopt;
          x = std::move(*prev);
        }
        return x;
      };
    }
    bool prepends = true;
    std::vector<Bit> prefix;
    for (std::size_t j = k; j-- > 0 && prepends;) {
      const auto& p = F.map(word[j]).prepend;
      if (!p) prepends = false;
      else prefix.insert(prefix.end(), p->begin(), p->end());
    }
    if (prepends) m.prepend = std::move(prefix);
    maps.push_back(std::move(m));
  }
  std::optional<double> ratio;
  if (F.ratio()) ratio = std::pow(*F.ratio(), static_cast<double>(k));
  return IFSystem(F.name() + "^" + std::to_string(k), F.space(), std::move(maps), ratio);
}

Conjugacy conjugate_ifs(const IFSystem& F, const Space& target, MapFn h, MapFn h_inv,
                        std::size_t samples, std::uint64_t seed) {
  require(samples >= 1, ErrorCode::invalid_argument, "conjugacy check needs samples >= 1");
  Rng rng(seed);
  double lower = std::numeric_limits<double>::infinity();
  double upper = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    const Point p = random_point(F.space(), rng);
    const Point q = random_point(F.space(), rng);
    const Point hp = h(p);
    const Point hq = h(q);
    require(distance(F.space(), h_inv(hp), p) <= 1e-9 && distance(target, h(h_inv(hp)), hp) <= 1e-9,
            ErrorCode::precondition_failed, "h_inv is not an inverse of h on samples");
    const double d = distance(F.space(), p, q);
    if (d <= 0.0) continue;
    const double r = distance(target, hp, hq) / d;
    lower = std::min(lower, r);
    upper = std::max(upper, r);
  }
  require(upper > 0.0, ErrorCode::precondition_failed, "no distinct sample pairs for distortion");

  auto base = std::make_shared<const IFSystem>(F);
  std::vector<MapSpec> maps;
  for (Symbol s : F.symbols()) {
    MapSpec m;
    m.label = F.label(s);
    m.forward = [base, s, h, h_inv](const Point& p) { return h(base->apply(s, h_inv(p))); };
    if (F.has_inverse(s)) {
      m.inverse = [base, s, h, h_inv](const Point& p) -> std::optional<Point> {
        auto x = base->preimage(s, h_inv(p));
        if (!x) return std::nullopt;
        return h(*x);
      };
    }
    maps.push_back(std::move(m));
  }
  return {IFSystem("h(" + F.name() + ")", target, std::move(maps)), lower, upper};
}

IFSystem subsystem(const IFSystem& F, const SymbolWord& keep) {
  require(!keep.empty(), ErrorCode::invalid_argument, "subsystem needs at least one symbol");
  std::vector<MapSpec> maps;
  for (Symbol s : keep) maps.push_back(F.map(s));
  std::string name = F.name() + "{";
  for (std::size_t i = 0; i < keep.size(); ++i) name += (i ? "," : "") + F.label(keep[i]);
  return IFSystem(name + "}", F.space(), std::move(maps), F.ratio());
}

}  // namespace avgshadow

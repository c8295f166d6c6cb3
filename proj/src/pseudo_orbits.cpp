#include "avgshadow/pseudo_orbits.hpp"

#include <algorithm>
#include <cmath>

#include "avgshadow/error.hpp"
#include "compensated_sum.hpp"

namespace avgshadow {

using detail::CompensatedSum;

std::vector<double> step_errors(const IFSystem& ifs, std::span<const Point> points,
                                std::span<const Symbol> symbols) {
  require(points.size() == symbols.size() + 1, ErrorCode::invalid_argument,
          "pseudo-orbit needs exactly one more point than symbols");
  std::vector<double> alpha(symbols.size());
  for (std::size_t i = 0; i < symbols.size(); ++i)
    alpha[i] = distance(ifs.space(), ifs.apply(symbols[i], points[i]), points[i + 1]);
  return alpha;
}

PseudoOrbit make_pseudo_orbit(const IFSystem& ifs, std::vector<Point> points, SymbolWord symbols) {
  for (const Point& p : points) check_shape(ifs.space(), p);
  for (Symbol s : symbols) ifs.check_symbol(s);
  PseudoOrbit orbit;
  orbit.space = ifs.space();
  orbit.errors = step_errors(ifs, points, symbols);
  orbit.points = std::move(points);
  orbit.symbols = std::move(symbols);
  return orbit;
}

PseudoOrbit attach_symbols(const IFSystem& ifs, std::vector<Point> points,
                           const SymbolStream& stream) {
  require(!points.empty(), ErrorCode::invalid_argument, "pseudo-orbit needs at least one point");
  SymbolWord symbols = stream.take(points.size() - 1);
  return make_pseudo_orbit(ifs, std::move(points), std::move(symbols));
}

bool ledger_consistent(const IFSystem& ifs, const PseudoOrbit& orbit, double tolerance) {
  if (orbit.points.size() != orbit.symbols.size() + 1 || orbit.errors.size() != orbit.symbols.size())
    return false;
  const auto fresh = step_errors(ifs, orbit.points, orbit.symbols);
  for (std::size_t i = 0; i < fresh.size(); ++i)
    if (!(std::fabs(fresh[i] - orbit.errors[i]) <= tolerance)) return false;
  return true;
}

PseudoOrbit exact_orbit(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                        std::size_t steps) {
  check_shape(ifs.space(), z);
  PseudoOrbit orbit;
  orbit.space = ifs.space();
  orbit.points.reserve(steps + 1);
  orbit.points.push_back(z);
  orbit.symbols = stream.take(steps);
  for (Symbol s : orbit.symbols) orbit.points.push_back(ifs.apply(s, orbit.points.back()));
  orbit.errors.assign(steps, 0.0);
  return orbit;
}

PseudoOrbit noisy_average_orbit(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                                std::size_t steps, double delta, const NoiseModel& model,
                                std::uint64_t seed) {
  require(delta > 0.0, ErrorCode::invalid_argument, "delta must be positive");
  if (model.kind == NoiseModel::Kind::bursty) {
    require(model.period >= 1 && model.jump >= 0.0, ErrorCode::invalid_argument,
            "bursty noise needs period >= 1 and jump >= 0");
    require(model.jump / static_cast<double>(model.period) < delta, ErrorCode::invalid_argument,
            "bursty noise needs J/T < delta");
  }
  check_shape(ifs.space(), z);
  Rng rng(seed);
  std::vector<Point> points;
  points.reserve(steps + 1);
  points.push_back(z);
  SymbolWord symbols = stream.take(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    Point next = ifs.apply(symbols[i], points.back());
    double radius = 0.0;
    if (model.kind == NoiseModel::Kind::uniform) {
      radius = 0.9 * delta * rng.uniform();
    } else if ((i + 1) % model.period == 0) {
      radius = model.jump;
    }
    if (radius > 0.0) next = perturb(ifs.space(), next, radius, rng);
    points.push_back(std::move(next));
  }
  return make_pseudo_orbit(ifs, std::move(points), std::move(symbols));
}

std::vector<Point> block_switching_points(const Point& b, const Point& c, std::size_t K,
                                          std::size_t horizon) {
  require(K >= 1, ErrorCode::invalid_argument, "block length K must be >= 1");
  std::vector<Point> out;
  out.reserve(horizon + 1);
  std::size_t block_end = K;  // last index of the current block
  bool use_b = true;
  std::size_t j = 0;
  for (std::size_t i = 0; i <= horizon; ++i) {
    if (i > block_end) {
      if (block_end == K) {
        block_end = 3 * K;
        use_b = false;
      } else {
        // Block j covers 3·2^j·K+1 … 3·2^{j+1}·K.
        block_end = 3 * K * (std::size_t{2} << j);
        use_b = (j % 2 == 0);
        ++j;
      }
    }
    out.push_back(use_b ? b : c);
  }
  return out;
}

BackwardLeg inverse_leg(const IFSystem& ifs, const Point& y, Symbol symbol, std::size_t count) {
  BackwardLeg leg;
  leg.preimages.reserve(count);
  Point current = y;
  for (std::size_t j = 0; j < count; ++j) {
    auto prev = ifs.preimage(symbol, current);
    require(prev.has_value(), ErrorCode::preimage_unavailable,
            "no preimage under '" + ifs.label(symbol) + "' at step " + std::to_string(j + 1));
    current = std::move(*prev);
    leg.preimages.push_back(current);
    leg.symbols.push_back(symbol);
  }
  return leg;
}

namespace {

// z_m = f_{a_m} ∘ … ∘ f_{a_{L-1}}(base) for m = 0 … L.
std::vector<Point> address_suffixes(const IFSystem& ifs, const SymbolWord& address, const Point& base) {
  std::vector<Point> z(address.size() + 1);
  z[address.size()] = base;
  for (std::size_t m = address.size(); m-- > 0;) z[m] = ifs.apply(address[m], z[m + 1]);
  return z;
}

}  // namespace

Point address_point(const IFSystem& ifs, const SymbolWord& address, const Point& base) {
  return address_suffixes(ifs, address, base).front();
}

BackwardLeg address_leg(const IFSystem& ifs, const SymbolWord& address, const Point& base,
                        std::size_t count) {
  require(count < address.size(), ErrorCode::invalid_argument,
          "address leg needs count below the address length");
  const auto z = address_suffixes(ifs, address, base);
  BackwardLeg leg;
  leg.preimages.assign(z.begin() + 1, z.begin() + 1 + static_cast<std::ptrdiff_t>(count));
  leg.symbols.assign(address.begin(), address.begin() + static_cast<std::ptrdiff_t>(count));
  return leg;
}

PseudoOrbit cyclic_connecting_orbit(const IFSystem& ifs, const Point& x, const Point& y,
                                    Symbol symbol, std::size_t N0, std::size_t horizon) {
  require(N0 >= 3, ErrorCode::invalid_argument, "cyclic connecting orbit needs N0 >= 3");
  return cyclic_connecting_orbit(ifs, x, y, inverse_leg(ifs, y, symbol, N0 - 2), symbol, N0, horizon);
}

PseudoOrbit cyclic_connecting_orbit(const IFSystem& ifs, const Point& x, const Point& y,
                                    const BackwardLeg& leg, Symbol symbol, std::size_t N0,
                                    std::size_t horizon) {
  require(N0 >= 3, ErrorCode::invalid_argument, "cyclic connecting orbit needs N0 >= 3");
  check_shape(ifs.space(), x);
  check_shape(ifs.space(), y);
  ifs.check_symbol(symbol);

  std::vector<Point> forward{x};
  for (std::size_t r = 1; r <= N0; ++r) forward.push_back(ifs.apply(symbol, forward.back()));

  std::vector<Point> cycle;
  SymbolWord cycle_symbols;
  // y already on the forward orbit: the plain orbit loop x … y, then back to x.
  for (std::size_t m = 0; m <= N0; ++m) {
    if (distance(ifs.space(), forward[m], y) == 0.0) {
      cycle.assign(forward.begin(), forward.begin() + static_cast<std::ptrdiff_t>(m + 1));
      cycle_symbols.assign(m + 1, symbol);
      break;
    }
  }
  if (cycle.empty()) {
    require(leg.preimages.size() >= N0 - 2 && leg.symbols.size() >= N0 - 2,
            ErrorCode::preimage_unavailable, "backward leg shorter than N0 - 2");
    const std::size_t period = 2 * N0;
    cycle.reserve(period);
    cycle_symbols.reserve(period);
    for (std::size_t r = 0; r < period; ++r) {
      if (r <= N0) {
        cycle.push_back(forward[r]);
        cycle_symbols.push_back(symbol);
      } else if (r <= period - 2) {
        const std::size_t m = period - r - 1;
        cycle.push_back(leg.preimages[m - 1]);
        cycle_symbols.push_back(leg.symbols[m - 1]);
      } else {
        cycle.push_back(y);
        cycle_symbols.push_back(symbol);
      }
    }
  }

  std::vector<Point> points;
  SymbolWord symbols;
  points.reserve(horizon + 1);
  symbols.reserve(horizon);
  for (std::size_t i = 0; i <= horizon; ++i) {
    points.push_back(cycle[i % cycle.size()]);
    if (i < horizon) symbols.push_back(cycle_symbols[i % cycle.size()]);
  }
  return make_pseudo_orbit(ifs, std::move(points), std::move(symbols));
}

bool AverageValidation::passed() const {
  return mode == ValidationMode::plain ? plain_ok : first_index.has_value();
}

AverageValidation validate(std::span<const double> errors, double delta, ValidationMode mode) {
  require(delta > 0.0, ErrorCode::invalid_argument, "delta must be positive");
  AverageValidation v;
  v.delta = delta;
  v.mode = mode;
  v.horizon = errors.size();
  v.plain_ok = std::all_of(errors.begin(), errors.end(), [&](double a) { return a < delta; });

  const std::size_t L = errors.size();
  // below[n-1]: the (worst) average over windows of length n is < δ, decided
  // as sum < δ·n so that a constant α = δ never passes through rounding.
  std::vector<std::uint8_t> below(L);
  v.profile.resize(L);
  if (mode == ValidationMode::average_shifted) {
    std::vector<double> prefix(L + 1, 0.0);
    CompensatedSum acc;
    for (std::size_t i = 0; i < L; ++i) {
      acc.add(errors[i]);
      prefix[i + 1] = acc.value();
    }
    for (std::size_t n = 1; n <= L; ++n) {
      double worst = 0.0;
      for (std::size_t k = 0; k + n <= L; ++k) worst = std::max(worst, prefix[k + n] - prefix[k]);
      v.profile[n - 1] = worst / static_cast<double>(n);
      below[n - 1] = worst < delta * static_cast<double>(n);
    }
  } else {
    CompensatedSum acc;
    for (std::size_t n = 1; n <= L; ++n) {
      acc.add(errors[n - 1]);
      const double s = acc.value();
      v.profile[n - 1] = s / static_cast<double>(n);
      below[n - 1] = s < delta * static_cast<double>(n);
    }
  }
  if (L == 0) {
    v.first_index = 1;
  } else if (below[L - 1]) {
    std::size_t n = L;
    while (n > 1 && below[n - 2]) --n;
    v.first_index = n;
  }
  return v;
}

AverageValidation validate(const PseudoOrbit& orbit, double delta, ValidationMode mode) {
  return validate(orbit.errors, delta, mode);
}

PseudoOrbit refine_power_orbit(const IFSystem& base, std::size_t k, const PseudoOrbit& power_orbit) {
  require(k >= 1, ErrorCode::invalid_argument, "power needs k >= 1");
  std::vector<Point> points;
  SymbolWord symbols;
  points.reserve(power_orbit.steps() * k + 1);
  symbols.reserve(power_orbit.steps() * k);
  for (std::size_t n = 0; n < power_orbit.steps(); ++n) {
    const SymbolWord word = power_word(base.size(), k, power_orbit.symbols[n]);
    points.push_back(power_orbit.points[n]);
    for (std::size_t j = 0; j < k; ++j) {
      symbols.push_back(word[j]);
      if (j + 1 < k) points.push_back(base.apply(word[j], points.back()));
    }
  }
  points.push_back(power_orbit.points.back());
  return make_pseudo_orbit(base, std::move(points), std::move(symbols));
}

PseudoOrbit project(const IFSystem& product, const PseudoOrbit& orbit, int which) {
  require(product.product().has_value(), ErrorCode::space_mismatch, "not a product system");
  require(which == 0 || which == 1, ErrorCode::invalid_argument, "factor must be 0 or 1");
  const IFSystem& factor = which == 0 ? *product.product()->first : *product.product()->second;
  std::vector<Point> points;
  SymbolWord symbols;
  points.reserve(orbit.points.size());
  for (const Point& p : orbit.points) points.push_back(which == 0 ? p.first() : p.second());
  for (Symbol s : orbit.symbols) {
    const auto [a, b] = split_product_symbol(product, s);
    symbols.push_back(which == 0 ? a : b);
  }
  return make_pseudo_orbit(factor, std::move(points), std::move(symbols));
}

PseudoOrbit zip(const IFSystem& product, const PseudoOrbit& first, const PseudoOrbit& second) {
  require(first.points.size() == second.points.size(), ErrorCode::invalid_argument,
          "zipped pseudo-orbits need equal length");
  std::vector<Point> points;
  SymbolWord symbols;
  for (std::size_t i = 0; i < first.points.size(); ++i)
    points.push_back(Point::pair(first.points[i], second.points[i]));
  for (std::size_t i = 0; i < first.symbols.size(); ++i)
    symbols.push_back(join_product_symbol(product, first.symbols[i], second.symbols[i]));
  return make_pseudo_orbit(product, std::move(points), std::move(symbols));
}

PseudoOrbit transport(const IFSystem& target, const PseudoOrbit& orbit, const MapFn& h) {
  std::vector<Point> points;
  points.reserve(orbit.points.size());
  for (const Point& p : orbit.points) points.push_back(h(p));
  return make_pseudo_orbit(target, std::move(points), orbit.symbols);
}

}  // namespace avgshadow

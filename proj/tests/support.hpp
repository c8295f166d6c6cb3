#pragma once

// Hand-rolled generators shared by the property tests.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "avgshadow/ifs.hpp"
#include "avgshadow/rng.hpp"
#include "avgshadow/spaces.hpp"

namespace testgen {

using namespace avgshadow;

inline std::vector<Space> all_spaces() {
  const double h = std::sqrt(3.0) / 2.0;
  return {Space::interval(),
          Space::circle(),
          Space::plane({{0, 0}, {1, 0}, {0.5, h}}),
          Space::sigma2(),
          Space::discrete(4),
          Space::product(Space::circle(), Space::interval()),
          Space::product(Space::sigma2(), Space::plane({{0, 0}, {1, 0}, {0.5, h}}))};
}

inline SymbolWord random_word(Rng& rng, std::size_t alphabet, std::size_t length) {
  SymbolWord w(length);
  for (Symbol& s : w) s = Symbol{static_cast<std::uint32_t>(rng.below(alphabet))};
  return w;
}

inline std::vector<Bit> random_bits(Rng& rng, std::size_t length) {
  std::vector<Bit> out(length);
  for (Bit& b : out) b = Bit(rng.below(2));
  return out;
}

/// Random interval system of affine maps x -> r x + t with r in [0.1, 0.6].
inline IFSystem random_affine_system(Rng& rng) {
  const std::size_t count = 2 + rng.below(2);
  std::vector<MapSpec> maps;
  double beta = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double r = rng.uniform(0.1, 0.6);
    const double t = rng.uniform(0.0, 1.0 - r);
    beta = std::max(beta, r);
    maps.push_back({"a" + std::to_string(i), [r, t](const Point& p) { return Point::scalar(r * p.as_scalar() + t); },
                    {}, std::nullopt});
  }
  return IFSystem("affine", Space::interval(), std::move(maps), beta);
}

/// Reference expansion of a Σ₂ point: its first n symbols.
inline std::vector<Bit> expand(const BinarySequence& s, std::size_t n) {
  std::vector<Bit> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = s.at(i);
  return out;
}

}  // namespace testgen

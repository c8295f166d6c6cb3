#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "avgshadow/ifs.hpp"

namespace avgshadow {

/// Points x_0…x_n, symbols λ_0…λ_{n-1} and the step errors
/// α_i = d(f_{λ_i}(x_i), x_{i+1}).
struct PseudoOrbit {
  Space space = Space::interval();
  std::vector<Point> points;
  SymbolWord symbols;
  std::vector<double> errors;

  std::size_t steps() const { return symbols.size(); }
};

std::vector<double> step_errors(const IFSystem& ifs, std::span<const Point> points,
                                std::span<const Symbol> symbols);

/// Builds the orbit and its error ledger; requires points = symbols + 1.
PseudoOrbit make_pseudo_orbit(const IFSystem& ifs, std::vector<Point> points, SymbolWord symbols);

/// Symbols λ_i = stream(i) for every step of the point sequence.
PseudoOrbit attach_symbols(const IFSystem& ifs, std::vector<Point> points,
                           const SymbolStream& stream);

/// Stored α agrees with the recomputed distances.
bool ledger_consistent(const IFSystem& ifs, const PseudoOrbit& orbit, double tolerance = 1e-12);

PseudoOrbit exact_orbit(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                        std::size_t steps);

struct NoiseModel {
  enum class Kind { uniform, bursty };
  Kind kind = Kind::uniform;
  double jump = 0.0;       // bursty: J
  std::size_t period = 1;  // bursty: T

  static NoiseModel uniform() { return {}; }
  static NoiseModel bursty(double jump, std::size_t period) {
    return {Kind::bursty, jump, period};
  }
};

/// δ-average pseudo-orbit generator. Uniform: every step is perturbed by a
/// random amount below 0.9δ. Bursty: a jump of size ≤ J at steps
/// T-1, 2T-1, …, exact elsewhere; requires J/T < δ.
PseudoOrbit noisy_average_orbit(const IFSystem& ifs, const Point& z, const SymbolStream& stream,
                                std::size_t steps, double delta, const NoiseModel& model,
                                std::uint64_t seed);

/// The two-point block sequence: b on [0,K], c on [K+1,3K], then b / c on
/// the doubling blocks 3·2^j·K+1 … 3·2^{j+1}·K for even / odd j.
/// Returns x_0 … x_horizon.
std::vector<Point> block_switching_points(const Point& b, const Point& c, std::size_t K,
                                          std::size_t horizon);

/// Preimage chain y_1, y_2, … of a target y: f_{symbols[j-1]}(y_j) = y_{j-1}
/// with y_0 = y.
struct BackwardLeg {
  std::vector<Point> preimages;
  SymbolWord symbols;
};

/// Preimages of y under the registered inverse of one map. Throws
/// preimage_unavailable when some step leaves the image of the map.
BackwardLeg inverse_leg(const IFSystem& ifs, const Point& y, Symbol symbol, std::size_t count);

/// y = f_{a_0} ∘ f_{a_1} ∘ … ∘ f_{a_{L-1}}(base).
Point address_point(const IFSystem& ifs, const SymbolWord& address, const Point& base);

/// Preimage chain of address_point(address, base) read off the address:
/// y_j = f_{a_j} ∘ … ∘ f_{a_{L-1}}(base). Computed forward, so each step is
/// exact even when the maps contract. Requires count < L.
BackwardLeg address_leg(const IFSystem& ifs, const SymbolWord& address, const Point& base,
                        std::size_t count);

/// Periodic sequence of period 2N₀ connecting x to y: forward f_λ′-orbit of x
/// on residues [0,N₀], preimages y_{N₀-2} … y_1 on [N₀+1, 2N₀-2], y on
/// 2N₀-1. Returns x_0 … x_horizon.
PseudoOrbit cyclic_connecting_orbit(const IFSystem& ifs, const Point& x, const Point& y,
                                    Symbol symbol, std::size_t N0, std::size_t horizon);
PseudoOrbit cyclic_connecting_orbit(const IFSystem& ifs, const Point& x, const Point& y,
                                    const BackwardLeg& leg, Symbol symbol, std::size_t N0,
                                    std::size_t horizon);

enum class ValidationMode { plain, average, average_shifted };

/// Outcome of checking a pseudo-orbit at threshold δ. All statements hold
/// only up to the stored horizon.
struct AverageValidation {
  double delta = 0.0;
  ValidationMode mode = ValidationMode::average;
  std::size_t horizon = 0;                // number of steps examined
  bool plain_ok = false;                  // every α_i < δ
  std::optional<std::size_t> first_index; // N: averages < δ for all n ≥ N
  std::vector<double> profile;            // A_n for n = 1 … horizon

  bool passed() const;
};

AverageValidation validate(std::span<const double> errors, double delta, ValidationMode mode);
AverageValidation validate(const PseudoOrbit& orbit, double delta, ValidationMode mode);

/// Interleave a pseudo-orbit of F^k with the intermediate images
/// x_n, f_{λ_0}(x_n), …, f_{λ_{k-2}}∘…∘f_{λ_0}(x_n), giving a pseudo-orbit of F.
PseudoOrbit refine_power_orbit(const IFSystem& base, std::size_t k, const PseudoOrbit& power_orbit);

/// Coordinate sequence (which = 0 or 1) of a product pseudo-orbit with its
/// factor symbols.
PseudoOrbit project(const IFSystem& product, const PseudoOrbit& orbit, int which);

/// Pair two factor pseudo-orbits of equal length into one of F × G.
PseudoOrbit zip(const IFSystem& product, const PseudoOrbit& first, const PseudoOrbit& second);

/// Same symbols, points mapped by `h`, errors recomputed against `target`.
PseudoOrbit transport(const IFSystem& target, const PseudoOrbit& orbit, const MapFn& h);

}  // namespace avgshadow

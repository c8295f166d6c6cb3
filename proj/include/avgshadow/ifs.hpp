#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avgshadow/spaces.hpp"

namespace avgshadow {

/// Index into the symbol set Λ of an IFS.
struct Symbol {
  std::uint32_t value = 0;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;
};

using SymbolWord = std::vector<Symbol>;

using MapFn = std::function<Point(const Point&)>;
/// Preimage under one map; nullopt when the point is not in the image.
using InverseFn = std::function<std::optional<Point>(const Point&)>;

struct MapSpec {
  std::string label;
  MapFn forward;
  InverseFn inverse;  // may be empty
  /// For Σ₂ maps of the form s ↦ word·s; enables exact cylinder images.
  std::optional<std::vector<Bit>> prepend;
};

class IFSystem;

struct ProductStructure {
  std::shared_ptr<const IFSystem> first;
  std::shared_ptr<const IFSystem> second;
};

/// A finite family {f_λ : λ ∈ Λ} of total self-maps of one space.
/// Immutable after construction; maps must be pure.
class IFSystem {
 public:
  IFSystem(std::string name, Space space, std::vector<MapSpec> maps,
           std::optional<double> ratio = std::nullopt);

  const std::string& name() const { return name_; }
  const Space& space() const { return space_; }
  std::size_t size() const { return maps_.size(); }

  /// Analytic contraction ratio β, when known.
  std::optional<double> ratio() const { return ratio_; }

  const std::string& label(Symbol s) const;
  std::optional<Symbol> find(std::string_view label) const;
  SymbolWord symbols() const;

  const MapSpec& map(Symbol s) const;
  bool has_inverse(Symbol s) const;
  void check_symbol(Symbol s) const;

  Point apply(Symbol s, const Point& p) const;
  /// Throws unsupported when no inverse is registered for `s`.
  std::optional<Point> preimage(Symbol s, const Point& p) const;

  const std::optional<ProductStructure>& product() const { return product_; }

 private:
  friend IFSystem product_ifs(const IFSystem&, const IFSystem&);

  std::string name_;
  Space space_;
  std::vector<MapSpec> maps_;
  std::optional<double> ratio_;
  std::optional<ProductStructure> product_;
};

Point apply(const IFSystem& ifs, Symbol s, const Point& p);

/// F_w(p) = f_{w[n-1]} ∘ … ∘ f_{w[0]}(p): the first symbol acts first.
Point compose_apply(const IFSystem& ifs, const SymbolWord& word, const Point& p);

struct RatioEstimate {
  double value = 0.0;
  bool analytic = false;  // false: sampled lower bound on the true ratio
  std::size_t samples = 0;
};

RatioEstimate contraction_ratio(const IFSystem& ifs, std::size_t samples, std::uint64_t seed);

/// Largest sampled ratio d(f(x),f(y))/d(x,y) over all maps, ignoring any
/// analytic value.
double sampled_ratio(const IFSystem& ifs, std::size_t samples, std::uint64_t seed);

/// True when every map sends sampled points back into the space.
bool maps_into_space(const IFSystem& ifs, std::size_t samples, std::uint64_t seed,
                     double tolerance = 1e-9);

/// F × G on the max-metric product; symbol (λ, γ) has index λ·|Γ| + γ.
IFSystem product_ifs(const IFSystem& F, const IFSystem& G);

std::pair<Symbol, Symbol> split_product_symbol(const IFSystem& product, Symbol s);
Symbol join_product_symbol(const IFSystem& product, Symbol first, Symbol second);

/// F^k: one map per word (λ_0,…,λ_{k-1}), acting as f_{λ_{k-1}}∘…∘f_{λ_0}.
/// The word's index is Σ λ_j |Λ|^{k-1-j}.
IFSystem power_ifs(const IFSystem& F, std::size_t k);

/// The k-letter word behind a power-system symbol.
SymbolWord power_word(std::size_t base_size, std::size_t k, Symbol s);

struct Conjugacy {
  IFSystem system;
  double lower = 0.0;  // L: min sampled d'(h p, h q)/d(p, q)
  double upper = 0.0;  // K: max sampled distortion
};

/// g_λ = h ∘ f_λ ∘ h⁻¹ on `target`. Throws precondition_failed when h and
/// h_inv are not mutually inverse on samples (tolerance 1e-9).
Conjugacy conjugate_ifs(const IFSystem& F, const Space& target, MapFn h, MapFn h_inv,
                        std::size_t samples, std::uint64_t seed);

/// The subsystem keeping only the listed symbols (renumbered in order).
IFSystem subsystem(const IFSystem& F, const SymbolWord& keep);

/// Reproducible symbol sequence σ = (λ_0, λ_1, …). Element n depends only on
/// the descriptor, never on access order.
class SymbolStream {
 public:
  static SymbolStream constant(Symbol s);
  static SymbolStream periodic(SymbolWord word);
  static SymbolStream random(std::size_t alphabet, std::uint64_t seed);
  static SymbolStream explicit_list(SymbolWord word);

  Symbol at(std::size_t n) const;
  SymbolWord take(std::size_t n) const;
  std::string describe() const;

 private:
  enum class Kind { constant, periodic, random, explicit_list };

  SymbolStream(Kind kind, SymbolWord word, std::size_t alphabet, std::uint64_t seed)
      : kind_(kind), word_(std::move(word)), alphabet_(alphabet), seed_(seed) {}

  Kind kind_;
  SymbolWord word_;
  std::size_t alphabet_ = 0;
  std::uint64_t seed_ = 0;
};

}  // namespace avgshadow

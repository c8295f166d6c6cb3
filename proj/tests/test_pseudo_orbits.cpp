#include <doctest.h>

#include <cmath>
#include <optional>

#include "avgshadow/catalog.hpp"
#include "avgshadow/error.hpp"
#include "avgshadow/pseudo_orbits.hpp"
#include "support.hpp"

using namespace avgshadow;

namespace {

// Reference first index: naive long double sums, every window recomputed.
std::optional<std::size_t> naive_first_index(const std::vector<double>& a, double delta, bool shifted) {
  const std::size_t L = a.size();
  std::optional<std::size_t> N;
  for (std::size_t n = L; n >= 1; --n) {
    bool ok = true;
    for (std::size_t k = 0; k + n <= (shifted ? L : n); ++k) {
      long double s = 0;
      for (std::size_t i = k; i < k + n; ++i) s += a[i];
      if (!(s < static_cast<long double>(delta) * n)) ok = false;
    }
    if (!ok) break;
    N = n;
  }
  return L == 0 ? std::optional<std::size_t>(1) : N;
}

// Case table of the block orbit, written from the index ranges directly.
bool block_is_b(std::size_t i, std::size_t K) {
  if (i <= K) return true;
  if (i <= 3 * K) return false;
  std::size_t j = 0;
  while (!(3 * (std::size_t{1} << j) * K + 1 <= i && i <= 3 * (std::size_t{1} << (j + 1)) * K)) ++j;
  return j % 2 == 0;
}

}  // namespace

TEST_CASE("exact orbits") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const PseudoOrbit single = exact_orbit(F, Point::planar(0, 0), SymbolStream::constant(Symbol{0}), 0);
  CHECK(single.points.size() == 1);
  CHECK(single.errors.empty());
  const PseudoOrbit still = exact_orbit(F, Point::planar(0, 0), SymbolStream::constant(*F.find("f1")), 5);
  for (const Point& p : still.points) CHECK(p == Point::planar(0, 0));
  const PseudoOrbit corner = exact_orbit(F, Point::planar(1, 0), SymbolStream::constant(*F.find("f2")), 2);
  REQUIRE(corner.points.size() == 3);
  for (const Point& p : corner.points) CHECK(distance(F.space(), p, Point::planar(1, 0)) <= 1e-15);
  for (double a : corner.errors) CHECK(a == 0.0);
  CHECK(validate(corner, 0.01, ValidationMode::average).first_index == std::size_t{1});
}

TEST_CASE("validation examples") {
  std::vector<double> a(20, 0.0);
  a[0] = 0.4;
  const auto v = validate(a, 0.1, ValidationMode::average);
  CHECK_FALSE(v.plain_ok);
  CHECK(v.first_index == std::size_t{5});
  CHECK(v.profile[3] == doctest::Approx(0.1));
  CHECK(v.profile[4] == doctest::Approx(0.08));

  const std::vector<double> flat(50, 0.1);
  CHECK_FALSE(validate(flat, 0.1, ValidationMode::average).passed());
  CHECK_FALSE(validate(std::vector<double>(50, 0.3), 0.3, ValidationMode::average_shifted).passed());
  CHECK_THROWS_AS(validate(flat, 0.0, ValidationMode::average), Error);
}

TEST_CASE("property: validation agrees with naive window sums") {
  Rng rng(31);
  for (int t = 0; t < 400; ++t) {
    std::vector<double> a(1 + rng.below(40));
    for (double& x : a) x = rng.coin() ? 0.0 : rng.uniform(0.0, 0.5);
    const double delta = rng.uniform(0.02, 0.3);
    for (bool shifted : {false, true}) {
      const auto v = validate(a, delta, shifted ? ValidationMode::average_shifted : ValidationMode::average);
      REQUIRE(v.first_index == naive_first_index(a, delta, shifted));
    }
    const bool plain = std::all_of(a.begin(), a.end(), [&](double x) { return x < delta; });
    REQUIRE(validate(a, delta, ValidationMode::plain).plain_ok == plain);
  }
}

TEST_CASE("noise models") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const auto stream = SymbolStream::random(3, 4);
  const PseudoOrbit u = noisy_average_orbit(F, Point::planar(0.2, 0.1), stream, 2000, 0.1, NoiseModel::uniform(), 5);
  for (double a : u.errors) CHECK(a < 0.09);
  CHECK(validate(u, 0.1, ValidationMode::average).passed());

  const PseudoOrbit b = noisy_average_orbit(F, Point::planar(0.2, 0.1), stream, 8000, 0.1, NoiseModel::bursty(0.4, 8), 6);
  const auto v = validate(b, 0.1, ValidationMode::average);
  CHECK(v.passed());
  CHECK_FALSE(v.plain_ok);
  CHECK(v.profile.back() == doctest::Approx(0.05).epsilon(0.02));
  CHECK_THROWS_AS(noisy_average_orbit(F, Point::planar(0, 0), stream, 10, 0.1, NoiseModel::bursty(0.4, 2), 1), Error);
}

TEST_CASE("property: generated orbits validate and keep an exact ledger") {
  Rng rng(32);
  for (const auto& info : list_examples()) {
    const IFSystem F = make(info.descriptor);
    for (int t = 0; t < 20; ++t) {
      const double delta = rng.uniform(0.01, 0.3);
      const bool bursty = rng.coin();
      const NoiseModel m = bursty ? NoiseModel::bursty(delta * 3.5, 8) : NoiseModel::uniform();
      const PseudoOrbit o = noisy_average_orbit(F, random_point(F.space(), rng),
                                                SymbolStream::random(F.size(), rng.bits()), 300, delta, m, rng.bits());
      REQUIRE(o.points.size() == o.symbols.size() + 1);
      REQUIRE(o.errors.size() == o.symbols.size());
      REQUIRE(ledger_consistent(F, o));
      REQUIRE(validate(o, delta, ValidationMode::average).passed());
      const auto recomputed = step_errors(F, o.points, o.symbols);
      for (std::size_t i = 0; i < recomputed.size(); ++i) REQUIRE(recomputed[i] == o.errors[i]);
    }
  }
}

TEST_CASE("block switching orbit") {
  const Point b = Point::scalar(0.0);
  const Point c = Point::scalar(0.5);
  const auto x = block_switching_points(b, c, 2, 24);
  REQUIRE(x.size() == 25);
  for (std::size_t i = 0; i <= 2; ++i) CHECK(x[i] == b);
  for (std::size_t i = 3; i <= 6; ++i) CHECK(x[i] == c);
  for (std::size_t i = 7; i <= 12; ++i) CHECK(x[i] == b);
  for (std::size_t i = 13; i <= 24; ++i) CHECK(x[i] == c);

  Rng rng(33);
  for (int t = 0; t < 50; ++t) {
    const std::size_t K = 1 + rng.below(20);
    const std::size_t H = 3 * K + rng.below(2000);
    const auto y = block_switching_points(b, c, K, H);
    REQUIRE(y.size() == H + 1);
    for (std::size_t i = 0; i <= H; ++i) REQUIRE((y[i] == b) == block_is_b(i, K));
  }

  // b and c are fixed by both maps, so errors only occur at block edges.
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  for (std::size_t K : {4, 16, 64}) {
    const PseudoOrbit o = attach_symbols(F, block_switching_points(b, c, K, 3 * 256 * K), SymbolStream::random(2, K));
    const auto v = validate(o, 1.0, ValidationMode::average);
    for (std::size_t n = K + 1; n <= v.profile.size(); ++n)
      REQUIRE(v.profile[n - 1] < 3.0 * diameter(F.space()) / double(K));
  }
}

TEST_CASE("cyclic connecting orbit") {
  const IFSystem F = make(ExampleDescriptor::minimal_pair(0.125));
  const auto [lo, hi] = minimal_pair_domain(0.125);
  const Point x = Point::scalar(lo + 0.3 * (hi - lo));
  const Point y = Point::scalar(lo + 0.02 * (hi - lo));  // preimages under f1 drift away from lo
  const std::size_t N0 = 8;
  const PseudoOrbit o = cyclic_connecting_orbit(F, x, y, Symbol{0}, N0, 10 * 2 * N0);
  for (std::size_t i = 0; i < o.points.size(); i += 2 * N0) CHECK(o.points[i] == x);
  for (std::size_t i = 2 * N0 - 1; i < o.points.size(); i += 2 * N0) CHECK(o.points[i] == y);
  CHECK(ledger_consistent(F, o));
  const auto v = validate(o, 3.0 * diameter(F.space()) / double(N0), ValidationMode::average);
  CHECK(v.passed());

  // y on the forward orbit of x: the plain loop.
  const Point y2 = F.apply(Symbol{0}, F.apply(Symbol{0}, x));
  const PseudoOrbit loop = cyclic_connecting_orbit(F, x, y2, Symbol{0}, N0, 40);
  CHECK(validate(loop, 1.0, ValidationMode::average).passed());
  CHECK(loop.points.front() == x);

  // Points outside the image of f1 have no preimage.
  CHECK_THROWS_AS(inverse_leg(F, Point::scalar(hi), Symbol{0}, 3), Error);
}

TEST_CASE("address legs invert the address exactly") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  Rng rng(34);
  const SymbolWord a = testgen::random_word(rng, 3, 30);
  const Point base = Point::planar(0, 0);
  const Point y = address_point(F, a, base);
  const BackwardLeg leg = address_leg(F, a, base, 10);
  REQUIRE(leg.preimages.size() == 10);
  Point prev = y;
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(distance(F.space(), F.apply(leg.symbols[j], leg.preimages[j]), prev) <= 1e-15);
    prev = leg.preimages[j];
  }
}

TEST_CASE("property: power orbits refine into base orbits at the same delta") {
  Rng rng(35);
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  for (std::size_t k : {2, 3}) {
    const IFSystem Fk = power_ifs(F, k);
    for (int t = 0; t < 30; ++t) {
      const double delta = rng.uniform(0.01, 0.2);
      const PseudoOrbit coarse = noisy_average_orbit(Fk, random_point(F.space(), rng), SymbolStream::random(Fk.size(), rng.bits()),
                                                     200, delta, NoiseModel::uniform(), rng.bits());
      const PseudoOrbit fine = refine_power_orbit(F, k, coarse);
      REQUIRE(fine.steps() == k * coarse.steps());
      REQUIRE(validate(fine, delta, ValidationMode::average).passed());
    }
  }
}

TEST_CASE("property: product errors are the max of factor errors") {
  Rng rng(36);
  const IFSystem A = make(ExampleDescriptor::sierpinski());
  const IFSystem B = make(ExampleDescriptor::circle_counterexample(0.3));
  const IFSystem P = product_ifs(A, B);
  for (int t = 0; t < 30; ++t) {
    const PseudoOrbit oa = noisy_average_orbit(A, random_point(A.space(), rng), SymbolStream::random(3, rng.bits()), 100,
                                               0.1, NoiseModel::uniform(), rng.bits());
    const PseudoOrbit ob = noisy_average_orbit(B, random_point(B.space(), rng), SymbolStream::random(2, rng.bits()), 100,
                                               0.05, NoiseModel::bursty(0.1, 5), rng.bits());
    const PseudoOrbit op = zip(P, oa, ob);
    for (std::size_t i = 0; i < op.errors.size(); ++i) REQUIRE(op.errors[i] == std::max(oa.errors[i], ob.errors[i]));
    const PseudoOrbit back = project(P, op, 1);
    REQUIRE(back.symbols == ob.symbols);
    REQUIRE(back.errors == ob.errors);
  }
}

TEST_CASE("property: transport through x/2 scales errors by two") {
  Rng rng(37);
  for (int t = 0; t < 30; ++t) {
    const IFSystem F = testgen::random_affine_system(rng);
    const MapFn half = [](const Point& p) { return Point::scalar(p.as_scalar() / 2); };
    const MapFn twice = [](const Point& p) { return Point::scalar(p.as_scalar() * 2); };
    const Conjugacy c = conjugate_ifs(F, Space::interval(0, 0.5), half, twice, 200, rng.bits());
    const double delta = rng.uniform(0.01, 0.2);
    const PseudoOrbit g = noisy_average_orbit(c.system, random_point(c.system.space(), rng),
                                              SymbolStream::random(F.size(), rng.bits()), 200, 0.5 * delta,
                                              NoiseModel::uniform(), rng.bits());
    const PseudoOrbit f = transport(F, g, twice);
    for (std::size_t i = 0; i < f.errors.size(); ++i) REQUIRE(f.errors[i] == doctest::Approx(2 * g.errors[i]).epsilon(1e-12));
    REQUIRE(validate(f, delta, ValidationMode::average).passed());
  }
}

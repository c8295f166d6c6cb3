#include <doctest.h>

#include <cmath>

#include "avgshadow/catalog.hpp"
#include "avgshadow/error.hpp"
#include "avgshadow/shadowing.hpp"
#include "support.hpp"

using namespace avgshadow;

namespace {

IFSystem cantor_pair() {
  std::vector<MapSpec> maps;
  maps.push_back({"g1", [](const Point& p) { return Point::scalar(p.as_scalar() / 3); }, {}, {}});
  maps.push_back({"g2", [](const Point& p) { return Point::scalar(p.as_scalar() / 3 + 2.0 / 3); }, {}, {}});
  return IFSystem("cantor_pair", Space::interval(), std::move(maps), 1.0 / 3);
}

// Minimum horizon average over grid × words by plain enumeration.
double enumerate_oracle(const IFSystem& F, const PseudoOrbit& o, const std::vector<Point>& grid, std::size_t h) {
  double best = INFINITY;
  for (const Point& z : grid) {
    for (std::size_t w = 0; w < (std::size_t{1} << h); ++w) {
      double sum = 0;
      double x = z.as_scalar();
      for (std::size_t i = 0; i < h; ++i) {
        sum += std::fabs(x - o.points[i].as_scalar());
        const int bit = (w >> (h - 1 - (i % h))) & 1;
        x = bit ? x / 3 + 2.0 / 3 : x / 3;
      }
      best = std::min(best, sum / double(h));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("error bound examples") {
  const std::vector<double> zeros{0, 0, 0};
  CHECK(error_bound(zeros, 0.5, 1.0, 3) == 0.125);
  CHECK(error_bound(zeros, 0.5, 2.0, 0) == 2.0);
  const std::vector<double> a{0.1, 0.2};
  CHECK(error_bound(a, 0.5, 0.0, 2) == doctest::Approx(0.25));
  CHECK_THROWS_AS(error_bound(a, 0.5, 0.0, 3), Error);
}

TEST_CASE("constructive shadow basics") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const auto stream = SymbolStream::random(3, 41);
  const PseudoOrbit exact = exact_orbit(F, Point::planar(0.3, 0.2), stream, 50);
  const ShadowReport r = constructive_shadow(F, exact, 0.1);
  CHECK(*r.delta == doctest::Approx(0.025));
  for (double d : r.distances) CHECK(d == 0.0);
  CHECK(r.tail == 0.0);

  // One kick of 0.1 at the first step, exact afterwards.
  std::vector<Point> pts{Point::planar(0.2, 0.1)};
  const SymbolWord w = stream.take(40);
  pts.push_back(Point::planar(F.apply(w[0], pts[0]).as_vec().x + 0.1, F.apply(w[0], pts[0]).as_vec().y));
  for (std::size_t i = 1; i < w.size(); ++i) pts.push_back(F.apply(w[i], pts.back()));
  const PseudoOrbit kicked = make_pseudo_orbit(F, pts, w);
  CHECK(kicked.errors[0] == doctest::Approx(0.1));
  const ShadowReport k = constructive_shadow(F, kicked, 0.1);
  CHECK(k.bounds[1] == doctest::Approx(0.1));
  CHECK(k.bounds[2] == doctest::Approx(0.05));
  CHECK(k.bounds[3] == doctest::Approx(0.025));
  for (std::size_t i = 0; i < k.horizon; ++i) CHECK(k.distances[i] <= k.bounds[i] + 1e-12);

  // Orbits that do not validate at δ are refused.
  const PseudoOrbit rough = noisy_average_orbit(F, Point::planar(0, 0), stream, 100, 0.2, NoiseModel::uniform(), 3);
  CHECK_THROWS_AS(constructive_shadow(F, rough, 0.1), Error);
  CHECK_THROWS_AS(constructive_shadow(make(ExampleDescriptor::circle_counterexample(0.5)), rough, 0.1), Error);
}

TEST_CASE("property: ledger and cumulative bounds hold") {
  Rng rng(42);
  for (int t = 0; t < 200; ++t) {
    const IFSystem F = testgen::random_affine_system(rng);
    const double beta = *F.ratio();
    const double eps = rng.uniform(0.02, 0.5);
    const double delta = (1 - beta) * eps / 2;
    const NoiseModel m = rng.coin() ? NoiseModel::uniform() : NoiseModel::bursty(3 * delta, 4);
    const PseudoOrbit o = noisy_average_orbit(F, random_point(F.space(), rng), SymbolStream::random(F.size(), rng.bits()),
                                              400, delta, m, rng.bits());
    const ShadowReport r = constructive_shadow(F, o, eps);
    double sum = 0;
    for (std::size_t i = 0; i < r.horizon; ++i) {
      REQUIRE(r.distances[i] <= error_bound(o.errors, beta, 0.0, i) + 1e-9);
      sum += r.distances[i];
      REQUIRE(sum <= r.cumulative_bounds[i] + 1e-9);
    }
    REQUIRE(r.tail < eps);
  }
}

TEST_CASE("property: averages never exceed the running sup") {
  Rng rng(43);
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  for (int t = 0; t < 100; ++t) {
    const PseudoOrbit o = noisy_average_orbit(F, random_point(F.space(), rng), SymbolStream::random(2, rng.bits()), 300,
                                              0.1, NoiseModel::uniform(), rng.bits());
    const ShadowReport r = average_distance_profile(F, random_point(F.space(), rng), SymbolStream::random(2, rng.bits()), o);
    double sup = 0;
    double sum = 0;
    for (std::size_t n = 1; n <= r.horizon; ++n) {
      sup = std::max(sup, r.distances[n - 1]);
      sum += r.distances[n - 1];
      REQUIRE(r.profile[n - 1] <= sup + 1e-15);
      REQUIRE(r.profile[n - 1] == doctest::Approx(sum / double(n)).epsilon(1e-12));
    }
    double tail = 0;
    for (std::size_t n = tail_window_start(r.horizon, 0.1); n <= r.horizon; ++n) tail = std::max(tail, r.profile[n - 1]);
    REQUIRE(r.tail == tail);
  }
}

TEST_CASE("profile special cases") {
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const auto sigma = SymbolStream::random(2, 7);
  const PseudoOrbit o = exact_orbit(F, Point::scalar(0.3), sigma, 200);
  CHECK(average_distance_profile(F, Point::scalar(0.3), sigma, o).tail == 0.0);
  const std::vector<Point> still(100, Point::scalar(0.5));
  CHECK(average_distance_profile(F, Point::scalar(0.5), sigma, still).tail == 0.0);
  CHECK(tail_window_start(1000, 0.1) == 900);
  CHECK(tail_window_start(5, 1.0) == 1);
}

TEST_CASE("property: the frozen fast path equals the full profile") {
  Rng rng(44);
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const auto block = block_switching_points(Point::scalar(0), Point::scalar(0.5), 4, 3 * 64 * 4);
  for (int t = 0; t < 200; ++t) {
    const Point z = Point::scalar(double(rng.below(64)) / 64);
    const auto sigma = SymbolStream::random(2, rng.bits());
    const double fast = tail_average_distance(F, z, sigma, block);
    const double full = average_distance_profile(F, z, sigma, block).tail;
    REQUIRE(fast == doctest::Approx(full).epsilon(1e-12));
  }
}

TEST_CASE("block orbit tail against direct summation") {
  // z = c for every step: S_n is the fraction of b-points times d(b, c).
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const std::size_t K = 8;
  const std::size_t H = 3 * 1024 * K;
  const auto block = block_switching_points(Point::scalar(0), Point::scalar(0.5), K, H);
  const ShadowReport r = average_distance_profile(F, Point::scalar(0.5), SymbolStream::constant(Symbol{0}), block);
  std::size_t bs = 0;
  double best = 0;
  for (std::size_t n = 1; n <= block.size(); ++n) {
    bs += block[n - 1] == Point::scalar(0);
    if (n >= tail_window_start(block.size(), 0.1)) best = std::max(best, 0.5 * double(bs) / double(n));
  }
  CHECK(r.tail == doctest::Approx(best).epsilon(1e-12));
  CHECK(r.tail >= 0.5 / 3 - 0.01);
}

TEST_CASE("brute force oracle") {
  const IFSystem F = cantor_pair();
  const auto sigma = SymbolStream::random(2, 45);
  const PseudoOrbit exact = exact_orbit(F, Point::scalar(0.4), sigma, 10);
  const std::vector<Point> grid{Point::scalar(0.1), Point::scalar(0.4)};
  const ShadowReport best = brute_force_search(F, exact, grid, SearchStrategy::exhaustive(10), 10);
  CHECK(best.average() == 0.0);
  CHECK(best.shadow == Point::scalar(0.4));
  const ShadowReport greedy = brute_force_search(F, exact, grid, SearchStrategy::greedy(), 10);
  CHECK(greedy.average() == 0.0);

  const IFSystem G = make(ExampleDescriptor::sierpinski());
  const PseudoOrbit g = exact_orbit(G, Point::planar(0, 0), SymbolStream::random(3, 1), 20);
  const std::vector<Point> one{Point::planar(0, 0)};
  CHECK_THROWS_AS(brute_force_search(G, g, one, SearchStrategy::exhaustive(13), 14), Error);
  CHECK_NOTHROW(brute_force_search(G, g, one, SearchStrategy::exhaustive(12), 13));
}

TEST_CASE("oracle regression constant on the cantor pair") {
  const IFSystem F = cantor_pair();
  const PseudoOrbit o = noisy_average_orbit(F, Point::scalar(0.37), SymbolStream::random(2, 46), 5, 1.0 / 30,
                                            NoiseModel::uniform(), 47);
  std::vector<Point> grid;
  for (std::size_t k = 0; k < 64; ++k) grid.push_back(Point::scalar((double(k) + 0.5) / 64));
  grid.push_back(o.points.front());
  const ShadowReport best = brute_force_search(F, o, grid, SearchStrategy::exhaustive(6), 6);
  const double independent = enumerate_oracle(F, o, grid, 6);
  CHECK(best.average() == doctest::Approx(independent).epsilon(1e-14));
  const ShadowReport mine = constructive_shadow(F, o, 0.1);
  CHECK(best.average() <= mine.average());
  CHECK(best.average() == doctest::Approx(0.0087777970241121692).epsilon(1e-12));  // frozen
}

TEST_CASE("property: exhaustive oracle dominates the constructive shadow") {
  Rng rng(48);
  for (int t = 0; t < 60; ++t) {
    const IFSystem F = testgen::random_affine_system(rng);
    const double eps = 0.2;
    const PseudoOrbit o = noisy_average_orbit(F, random_point(F.space(), rng), SymbolStream::random(F.size(), rng.bits()),
                                              5, (1 - *F.ratio()) * eps / 2, NoiseModel::uniform(), rng.bits());
    std::vector<Point> grid{Point::scalar(0.5), o.points.front()};
    const ShadowReport best = brute_force_search(F, o, grid, SearchStrategy::exhaustive(6), 6);
    REQUIRE(best.average() <= constructive_shadow(F, o, eps).average());
  }
}

TEST_CASE("plain shadowing against average shadowing on a bursty orbit") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const auto sigma = SymbolStream::random(3, 49);
  const PseudoOrbit o = noisy_average_orbit(F, Point::planar(0.5, 0.3), sigma, 10000, 0.1, NoiseModel::bursty(0.4, 8), 50);
  // δ = 0.1 = (1 − β)ε/2 gives ε = 0.4.
  const ShadowReport r = constructive_shadow(F, o, 0.4);
  const PlainVerdict plain = plain_shadow_check(F, o, r.shadow, SymbolStream::explicit_list(o.symbols), 0.1);
  CHECK_FALSE(plain.shadows);
  CHECK(plain.max_deviation >= 0.3);
  CHECK(r.tail < 0.1);
  // Frozen regression pair.
  CHECK(plain.max_deviation == doctest::Approx(0.4015685660315243).epsilon(1e-12));
  CHECK(r.tail == doctest::Approx(0.099041105393579909).epsilon(1e-12));

  const PseudoOrbit exact = exact_orbit(F, Point::planar(0.5, 0.3), sigma, 100);
  CHECK(plain_shadow_check(F, exact, exact.points.front(), sigma, 1e-12).shadows);
}

TEST_CASE("property: decimated shadows of power orbits") {
  Rng rng(51);
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const IFSystem F2 = power_ifs(F, 2);
  for (int t = 0; t < 30; ++t) {
    const PseudoOrbit coarse = noisy_average_orbit(F2, random_point(F.space(), rng), SymbolStream::random(9, rng.bits()),
                                                   500, 0.02, NoiseModel::uniform(), rng.bits());
    const PseudoOrbit fine = refine_power_orbit(F, 2, coarse);
    const ShadowReport rf = constructive_shadow(F, fine, 0.2);
    const ShadowReport rc = decimated_profile(rf, coarse.points, 2, F.space());
    for (std::size_t i = 0; i < rc.horizon; ++i) REQUIRE(rc.distances[i] == rf.distances[2 * i]);
  }
}

TEST_CASE("convergence claim on the circle pair") {
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const auto o = convergence_claim(F, Point::scalar(0.3), SymbolStream::random(2, 52), Point::scalar(0), Point::scalar(0.5),
                                   1e-3, 10000);
  REQUIRE(o.step.has_value());
  CHECK(o.limit == 1);
  CHECK(o.final_distance <= 1e-3);
  const auto b = convergence_claim(F, Point::scalar(0.0), SymbolStream::random(2, 52), Point::scalar(0), Point::scalar(0.5),
                                   1e-3, 10);
  CHECK(b.step == std::size_t{0});
  CHECK(b.limit == 0);
}

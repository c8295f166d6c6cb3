#include <doctest.h>

#include <cmath>

#include "avgshadow/catalog.hpp"
#include "avgshadow/error.hpp"
#include "support.hpp"

using namespace avgshadow;

TEST_CASE("catalog listing") {
  const auto all = list_examples();
  CHECK(all.size() == 6);
  for (const auto& e : all) {
    CHECK_FALSE(e.name.empty());
    CHECK(make(e.descriptor).name() == e.name);
  }
  CHECK(describe(ExampleDescriptor::circle_counterexample(0.5)).expected_asp == "no");
  CHECK(describe(ExampleDescriptor::sierpinski()).expected_asp == "yes");
}

TEST_CASE("descriptor parsing and parameter ranges") {
  CHECK(ExampleDescriptor::parse("minimal_pair", {{"alpha", 0.2}}).parameter == 0.2);
  CHECK(ExampleDescriptor::parse("finite_set", {}).parameter == 3);
  CHECK_THROWS_AS(ExampleDescriptor::parse("minimal_pair", {{"alpha", 0.25}}), Error);
  CHECK_THROWS_AS(ExampleDescriptor::parse("circle_counterexample", {{"a", 1.0}}), Error);
  CHECK_THROWS_AS(ExampleDescriptor::parse("sierpinski", {{"a", 0.5}}), Error);
  CHECK_THROWS_AS(ExampleDescriptor::parse("koch", {}), Error);
  CHECK_THROWS_AS(make(ExampleDescriptor::finite_set(5)), Error);
}

TEST_CASE("finite sets use every permutation") {
  const IFSystem F = make(ExampleDescriptor::finite_set(3));
  CHECK(F.size() == 6);
  CHECK(F.ratio() == 1.0);
  for (Symbol s : F.symbols()) {
    std::vector<bool> hit(3, false);
    for (std::uint32_t i = 0; i < 3; ++i) hit[F.apply(s, Point::site(i)).as_site().index] = true;
    CHECK(hit == std::vector<bool>{true, true, true});
  }
}

TEST_CASE("circle counterexample formulas") {
  CHECK(counterexample_lift(0, 0.5, 0.25) == doctest::Approx(5.0 / 16));
  for (double a : {0.2, 0.5, 0.8}) {
    for (int which : {0, 1}) {
      CHECK(counterexample_lift(which, a, a) == doctest::Approx(a));
      CHECK(counterexample_lift(which, a, 0.0) == 0.0);
      CHECK(counterexample_lift(which, a, 1.0) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("property: circle maps are the projected lifts and grow off the fixed points") {
  for (double a : {0.3, 0.5, 0.7}) {
    const IFSystem F = make(ExampleDescriptor::circle_counterexample(a));
    for (int k = 1; k < 1000; ++k) {
      const double t = k / 1000.0;
      for (int which : {0, 1}) {
        const double lifted = counterexample_lift(which, a, t);
        const double image = F.apply(Symbol{std::uint32_t(which)}, Point::scalar(t)).as_scalar();
        REQUIRE(distance(F.space(), Point::scalar(image), Point::scalar(wrap_unit(lifted))) <= 1e-12);
        if (std::fabs(t - a) > 1e-12) REQUIRE(lifted > t);
      }
    }
  }
  const IFSystem H = make(ExampleDescriptor::circle_halfpoint());
  for (int k = 0; k < 1000; ++k) {
    const double t = k / 1000.0;
    for (int which : {0, 1})
      REQUIRE(distance(H.space(), H.apply(Symbol{std::uint32_t(which)}, Point::scalar(t)),
                       Point::scalar(wrap_unit(halfpoint_lift(which, t)))) <= 1e-12);
  }
  CHECK(halfpoint_lift(0, 0.25) == doctest::Approx(0.3125));
  CHECK(halfpoint_lift(1, 0.75) == doctest::Approx(0.8125));
}

TEST_CASE("property: registered inverses undo the circle maps") {
  Rng rng(71);
  for (const auto& d : {ExampleDescriptor::circle_counterexample(0.5), ExampleDescriptor::circle_counterexample(0.3),
                        ExampleDescriptor::circle_halfpoint()}) {
    const IFSystem F = make(d);
    for (int t = 0; t < 2000; ++t) {
      const Point y = random_point(F.space(), rng);
      for (Symbol s : F.symbols()) {
        const auto x = F.preimage(s, y);
        REQUIRE(x.has_value());
        REQUIRE(distance(F.space(), F.apply(s, *x), y) <= 1e-10);
      }
    }
  }
}

TEST_CASE("minimal pair lives on an invariant interval") {
  const auto [lo, hi] = minimal_pair_domain(0.125);
  CHECK(lo == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(hi == doctest::Approx(1.5).epsilon(1e-9));
  const IFSystem F = make(ExampleDescriptor::minimal_pair(0.125));
  CHECK(F.apply(Symbol{0}, Point::scalar(0.0)).as_scalar() == -0.125);
  CHECK(F.apply(Symbol{1}, Point::scalar(0.0)).as_scalar() == doctest::Approx(0.375));
  CHECK(maps_into_space(F, 5000, 2));
}

TEST_CASE("minimality probe") {
  std::vector<MapSpec> constant;
  constant.push_back({"c", [](const Point&) { return Point::scalar(0.3); }, {}, {}});
  const IFSystem C("constant", Space::interval(), std::move(constant));
  CHECK(minimality_probe(C, Point::scalar(0.9), 1000, 64, 1) == 1.0 / 64);

  const IFSystem M = make(ExampleDescriptor::minimal_pair(0.125));
  const double pair_coverage = minimality_probe(M, Point::scalar(0.1), 100000, 256, 7);
  CHECK(pair_coverage >= 0.99);
  const IFSystem G = make(ExampleDescriptor::sierpinski());
  const double gasket_coverage = minimality_probe(G, Point::planar(0, 0), 100000, 64, 7);
  CHECK(gasket_coverage < 0.8);
  // Frozen from the first run.
  CHECK(pair_coverage == 0.9921875);
  CHECK(gasket_coverage == doctest::Approx(0.46022727272727271).epsilon(1e-12));
}

#include <doctest.h>

#include <sstream>

#include "avgshadow/catalog.hpp"
#include "avgshadow/chain_recurrence.hpp"
#include "avgshadow/error.hpp"
#include "support.hpp"

using namespace avgshadow;

namespace {

IFSystem halving() {
  std::vector<MapSpec> maps;
  maps.push_back({"h", [](const Point& p) { return Point::scalar(p.as_scalar() / 2); }, {}, {}});
  return IFSystem("halving", Space::interval(), std::move(maps), 0.5);
}

// Transitive closure by repeated squaring of a boolean matrix.
std::vector<std::vector<bool>> closure(const ChainGraph& g) {
  const std::size_t n = g.size();
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (std::size_t v = 0; v < n; ++v)
    for (auto w : g.adjacency[v]) r[v][w] = true;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (r[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

bool subset(const ChainGraph& a, const ChainGraph& b) {
  for (std::size_t v = 0; v < a.size(); ++v)
    for (auto w : a.adjacency[v])
      if (!b.has_edge(v, w)) return false;
  return true;
}

}  // namespace

TEST_CASE("large epsilon gives the complete digraph") {
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const ChainGraph g = build_chain_graph(F, 32, 0.5, 9, 1);
  CHECK(g.edge_count() == 32 * 32);
  const RecurrenceReport r = analyze(g);
  CHECK(r.component_count == 1);
  CHECK(r.recurrent_count == 32);
}

TEST_CASE("a single contraction recurs only near its fixed point") {
  const ChainGraph g = build_chain_graph(halving(), 64, 0.01, 9, 1);
  CHECK(g.has_edge(0, 0));
  const RecurrenceReport r = analyze(g);
  const auto reach = closure(g);
  for (std::size_t v = 0; v < 64; ++v) CHECK(bool(r.recurrent[v]) == reach[v][v]);
  CHECK(r.recurrent[0]);
  CHECK_FALSE(r.recurrent[10]);
  CHECK_FALSE(r.recurrent[63]);

  const ChainSearch s = find_chain(halving(), Point::scalar(0.0), Point::scalar(0.9), 0.01, 64);
  CHECK_FALSE(s.chain.has_value());
  CHECK_FALSE(s.box_path);
  CHECK_THROWS_AS(build_chain_graph(halving(), 64, 0.0), Error);
  CHECK_THROWS_AS(build_chain_graph(halving(), 1, 0.1), Error);
}

TEST_CASE("property: analyze matches transitive closure on random digraphs") {
  Rng rng(61);
  for (int t = 0; t < 300; ++t) {
    ChainGraph g;
    const std::size_t n = 1 + rng.below(30);
    const double p = rng.uniform(0.0, 0.15);
    g.adjacency.assign(n, {});
    for (std::size_t v = 0; v < n; ++v)
      for (std::uint32_t w = 0; w < n; ++w)
        if (rng.uniform() < p) g.adjacency[v].push_back(w);
    const RecurrenceReport r = analyze(g);
    const auto reach = closure(g);
    std::size_t recurrent = 0;
    std::vector<std::size_t> heads;
    for (std::size_t v = 0; v < n; ++v) {
      REQUIRE(bool(r.recurrent[v]) == reach[v][v]);
      recurrent += reach[v][v];
      for (std::size_t w = 0; w < n; ++w) {
        const bool mutual = v == w || (reach[v][w] && reach[w][v]);
        REQUIRE((r.component[v] == r.component[w]) == mutual);
      }
      bool first = reach[v][v];
      for (std::size_t u = 0; u < v && first; ++u) first = !(reach[u][v] && reach[v][u]);
      if (first) heads.push_back(v);
    }
    REQUIRE(r.recurrent_count == recurrent);
    REQUIRE(r.component_count == heads.size());
    // Component ids follow the smallest member.
    for (std::size_t v = 1; v < n; ++v) {
      bool first_of_component = true;
      for (std::size_t u = 0; u < v; ++u) first_of_component = first_of_component && r.component[u] != r.component[v];
      if (first_of_component) {
        std::uint32_t prev_max = 0;
        for (std::size_t u = 0; u < v; ++u) prev_max = std::max(prev_max, r.component[u]);
        REQUIRE(r.component[v] == prev_max + 1);
      }
    }
  }
}

TEST_CASE("circle counterexample is chain recurrent everywhere") {
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const RecurrenceReport r = analyze(build_chain_graph(F, 256, 0.02));
  CHECK(r.recurrent_count == 256);
  CHECK(r.component_count == 1);

  // At ε = 0.005 both maps advance by more than ε around 0.3, so a loop
  // has to pass 1/2 and wrap through 0.
  const Point x = Point::scalar(0.3);
  const ChainSearch s = find_chain(F, x, x, 0.005, 1024);
  REQUIRE(s.chain.has_value());
  CHECK(s.chain->points.front() == x);
  CHECK(s.chain->points.back() == x);
  CHECK(validate(*s.chain, 0.005 + 1e-12, ValidationMode::plain).plain_ok);
  bool past_half = false;
  bool near_zero = false;
  for (const Point& p : s.chain->points) {
    past_half = past_half || p.as_scalar() > 0.5;
    near_zero = near_zero || p.as_scalar() < 0.1;
  }
  CHECK(past_half);
  CHECK(near_zero);
}

TEST_CASE("one step chains") {
  const IFSystem F = make(ExampleDescriptor::sierpinski());
  const Point x = Point::planar(0.3, 0.2);
  const Point y = F.apply(Symbol{2}, x);
  const ChainSearch s = find_chain(F, x, y, 0.05, 16);
  REQUIRE(s.chain.has_value());
  CHECK(s.chain->steps() == 1);
  CHECK(s.chain->errors[0] == 0.0);
}

TEST_CASE("halfpoint system: 1/2 is chain recurrent for the pair") {
  const IFSystem F = make(ExampleDescriptor::circle_halfpoint());
  const BoxCover cover(F.space(), 512);
  const std::size_t half = cover.locate(Point::scalar(0.5));
  CHECK(analyze(build_chain_graph(F, 512, 0.01)).recurrent[half]);
  // Both lifts fix 1/2, so each single map is also recurrent there.
  CHECK(halfpoint_lift(0, 0.5) == 0.5);
  CHECK(halfpoint_lift(1, 0.5) == 0.5);
  CHECK(analyze(build_chain_graph(subsystem(F, {Symbol{0}}), 512, 0.01)).recurrent[half]);
}

TEST_CASE("property: edges grow with epsilon and with the set of maps") {
  const IFSystem F = make(ExampleDescriptor::circle_counterexample(0.5));
  const IFSystem G = make(ExampleDescriptor::sierpinski());
  for (const IFSystem* sys : {&F, &G}) {
    const ChainGraph small = build_chain_graph(*sys, 32, 0.005, 9, 3);
    const ChainGraph large = build_chain_graph(*sys, 32, 0.02, 9, 3);
    CHECK(subset(small, large));
    const auto rs = analyze(small);
    const auto rl = analyze(large);
    for (std::size_t v = 0; v < rs.recurrent.size(); ++v) CHECK((!rs.recurrent[v] || rl.recurrent[v]));
    for (Symbol s : sys->symbols()) CHECK(subset(build_chain_graph(subsystem(*sys, {s}), 32, 0.01, 9, 3),
                                                 build_chain_graph(*sys, 32, 0.01, 9, 3)));
  }
}

TEST_CASE("sigma2 graphs use exact cylinder images") {
  const IFSystem S = make(ExampleDescriptor::sigma2_shift());
  const std::size_t r = 5;
  const ChainGraph g = build_chain_graph(S, r, 1e-6);
  // ε below every cylinder scale: w -> b·w truncated to r symbols.
  for (std::size_t w = 0; w < (1u << r); ++w) {
    const std::size_t t0 = w >> 1;
    const std::size_t t1 = (w >> 1) | (1u << (r - 1));
    CHECK(g.adjacency[w] == std::vector<std::uint32_t>{std::uint32_t(t0), std::uint32_t(t1)});
  }
  const RecurrenceReport rep = analyze(g);
  CHECK(rep.recurrent_count == (1u << r));
  CHECK(rep.component_count == 1);

  // Sampled images always land on an exact edge.
  Rng rng(62);
  const BoxCover& cover = *g.cover;
  const ChainGraph coarse = build_chain_graph(S, r, 0.1);
  for (int t = 0; t < 2000; ++t) {
    const Point p = random_point(S.space(), rng);
    for (Symbol s : S.symbols()) {
      const Point q = S.apply(s, p);
      for (std::size_t target = 0; target < cover.size(); ++target)
        if (distance(S.space(), q, cover.center(target)) <= 0.1 + cover.covering_radius(target))
          REQUIRE(coarse.has_edge(cover.locate(p), target));
    }
  }
}

TEST_CASE("graphs are deterministic and export in fixed formats") {
  const IFSystem F = make(ExampleDescriptor::minimal_pair(0.125));
  const ChainGraph a = build_chain_graph(F, 64, 0.01, 9, 5);
  const ChainGraph b = build_chain_graph(F, 64, 0.01, 9, 5);
  CHECK(a.adjacency == b.adjacency);
  std::ostringstream e1, e2, csv;
  write_edge_list(e1, a);
  write_edge_list(e2, b);
  CHECK(e1.str() == e2.str());
  CHECK(e1.str().substr(0, 4) == "0 0\n");
  write_recurrence_csv(csv, analyze(a));
  CHECK(csv.str().rfind("box,component,recurrent\n0,", 0) == 0);
}

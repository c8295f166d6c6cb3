#include "avgshadow/chain_recurrence.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

#include "avgshadow/error.hpp"

namespace avgshadow {

std::size_t ChainGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& row : adjacency) n += row.size();
  return n;
}

bool ChainGraph::has_edge(std::size_t from, std::size_t to) const {
  const auto& row = adjacency.at(from);
  return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(to));
}

namespace {

bool all_prepend(const IFSystem& ifs) {
  if (ifs.space().kind() != SpaceKind::sigma2) return false;
  for (Symbol s : ifs.symbols())
    if (!ifs.map(s).prepend) return false;
  return true;
}

// Cylinder [w] maps onto [p·w]. Its closest approach to the center w′0^∞ of a
// target cylinder is 2^-k at the first disagreement k, or 0 if none, so the
// targets within `reach` form one aligned block of ids.
void cylinder_edges(const IFSystem& ifs, std::size_t r, double reach,
                    std::vector<std::vector<std::uint32_t>>& adjacency) {
  std::size_t m = 0;  // agreement needed on positions < m
  if (reach >= 1.0) {
    m = 0;
  } else {
    while (std::ldexp(1.0, -static_cast<int>(m)) > reach) ++m;
  }
  const std::size_t n = std::size_t{1} << r;
  for (std::size_t id = 0; id < n; ++id) {
    std::vector<Bit> w(r);
    for (std::size_t i = 0; i < r; ++i) w[i] = Bit((id >> (r - 1 - i)) & 1);
    auto& row = adjacency[id];
    for (Symbol s : ifs.symbols()) {
      std::vector<Bit> u = *ifs.map(s).prepend;
      u.insert(u.end(), w.begin(), w.end());
      const std::size_t q = std::min(m, u.size());
      bool feasible = true;
      for (std::size_t i = r; i < q && feasible; ++i) feasible = u[i] == 0;
      if (!feasible) continue;
      const std::size_t fixed = std::min(q, r);
      std::size_t head = 0;
      for (std::size_t i = 0; i < fixed; ++i) head = (head << 1) | u[i];
      const std::size_t span = std::size_t{1} << (r - fixed);
      for (std::size_t t = 0; t < span; ++t) row.push_back(static_cast<std::uint32_t>(head * span + t));
    }
  }
}

double max_covering_radius(const BoxCover& cover) {
  double out = 0.0;
  for (std::size_t id = 0; id < cover.size(); ++id) out = std::max(out, cover.covering_radius(id));
  return out;
}

}  // namespace

ChainGraph build_chain_graph(const IFSystem& ifs, std::size_t resolution, double epsilon,
                             std::size_t samples_per_box, std::uint64_t seed) {
  require(epsilon > 0.0, ErrorCode::invalid_argument, "epsilon must be positive");
  require(resolution >= 2, ErrorCode::invalid_argument, "chain graph needs resolution >= 2");
  require(samples_per_box >= 1, ErrorCode::invalid_argument, "need at least one sample per box");
  ChainGraph graph;
  graph.cover = std::make_shared<const BoxCover>(ifs.space(), resolution);
  graph.epsilon = epsilon;
  graph.samples_per_box = samples_per_box;
  graph.seed = seed;
  const BoxCover& cover = *graph.cover;
  graph.adjacency.assign(cover.size(), {});
  const double slack = max_covering_radius(cover);
  graph.effective_epsilon = epsilon + 2.0 * slack;

  if (all_prepend(ifs)) {
    cylinder_edges(ifs, resolution, epsilon + slack, graph.adjacency);
  } else {
    require(ifs.space().kind() != SpaceKind::sigma2, ErrorCode::unsupported,
            "sigma2 chain graphs need prepend maps");
    for (std::size_t id = 0; id < cover.size(); ++id) {
      auto& row = graph.adjacency[id];
      for (const Point& x : cover.samples(id, samples_per_box, seed)) {
        for (Symbol s : ifs.symbols()) {
          const Point image = ifs.apply(s, x);
          for (std::size_t target : cover.near(image, epsilon + slack)) {
            const double d = distance(ifs.space(), image, cover.center(target));
            if (d <= epsilon + cover.covering_radius(target))
              row.push_back(static_cast<std::uint32_t>(target));
          }
        }
      }
    }
  }
  for (auto& row : graph.adjacency) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return graph;
}

double RecurrenceReport::recurrent_fraction() const {
  return recurrent.empty() ? 0.0 : static_cast<double>(recurrent_count) / static_cast<double>(recurrent.size());
}

RecurrenceReport analyze(const ChainGraph& graph) {
  const std::size_t n = graph.size();
  constexpr std::uint32_t unset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> index(n, unset);
  std::vector<std::uint32_t> low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::vector<std::uint32_t>> members;
  std::uint32_t counter = 0;

  // Iterative Tarjan: frames hold (vertex, next edge position).
  std::vector<std::pair<std::uint32_t, std::size_t>> frames;
  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      const auto& row = graph.adjacency[v];
      if (pos < row.size()) {
        const std::uint32_t w = row[pos++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::vector<std::uint32_t> group;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          group.push_back(w);
        } while (w != done);
        std::sort(group.begin(), group.end());
        members.push_back(std::move(group));
      }
    }
  }

  std::sort(members.begin(), members.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  RecurrenceReport report;
  report.recurrent.assign(n, 0);
  report.component.assign(n, 0);
  report.scc_count = members.size();
  for (std::uint32_t c = 0; c < members.size(); ++c) {
    const auto& group = members[c];
    const bool cyclic = group.size() > 1 || graph.has_edge(group.front(), group.front());
    for (std::uint32_t v : group) {
      report.component[v] = c;
      report.recurrent[v] = cyclic;
    }
    if (cyclic) {
      ++report.component_count;
      report.recurrent_count += group.size();
    }
  }
  return report;
}

ChainSearch find_chain(const IFSystem& ifs, const Point& x, const Point& y, double epsilon,
                       std::size_t resolution, std::size_t samples_per_box, std::uint64_t seed) {
  const ChainGraph graph = build_chain_graph(ifs, resolution, epsilon, samples_per_box, seed);
  const BoxCover& cover = *graph.cover;
  ChainSearch result;
  result.resolution = resolution;
  result.epsilon = epsilon;

  // Box level: paths with at least one edge.
  {
    const std::size_t from = cover.locate(x);
    const std::size_t to = cover.locate(y);
    std::vector<std::uint8_t> seen(cover.size(), 0);
    std::deque<std::uint32_t> queue;
    for (std::uint32_t w : graph.adjacency[from])
      if (!seen[w]) seen[w] = 1, queue.push_back(w);
    while (!queue.empty() && !seen[to]) {
      const std::uint32_t v = queue.front();
      queue.pop_front();
      for (std::uint32_t w : graph.adjacency[v])
        if (!seen[w]) seen[w] = 1, queue.push_back(w);
    }
    result.box_path = seen[to] != 0;
  }

  // Point level: node 0 = x, node 1 = y, then the box samples.
  std::vector<Point> nodes{x, y};
  std::vector<std::size_t> first_sample(cover.size() + 1, 0);
  for (std::size_t id = 0; id < cover.size(); ++id) {
    first_sample[id] = nodes.size();
    for (Point& p : cover.samples(id, samples_per_box, seed)) nodes.push_back(std::move(p));
  }
  first_sample[cover.size()] = nodes.size();
  const double slack = max_covering_radius(cover);

  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(nodes.size(), none);
  std::vector<Symbol> via(nodes.size());
  std::deque<std::size_t> queue{0};
  bool found = false;
  std::vector<std::uint8_t> expanded(nodes.size(), 0);
  while (!queue.empty() && !found) {
    const std::size_t v = queue.front();
    queue.pop_front();
    if (expanded[v]) continue;
    expanded[v] = 1;
    for (Symbol s : ifs.symbols()) {
      const Point image = ifs.apply(s, nodes[v]);
      auto visit = [&](std::size_t w) {
        if (parent[w] != none || w == 0) return;
        if (distance(ifs.space(), image, nodes[w]) > epsilon) return;
        parent[w] = v;
        via[w] = s;
        if (w == 1) found = true;
        queue.push_back(w);
      };
      visit(1);
      if (found) break;
      for (std::size_t box : cover.near(image, epsilon + slack))
        for (std::size_t w = first_sample[box]; w < first_sample[box + 1]; ++w) visit(w);
    }
  }

  if (found) {
    std::vector<Point> points;
    SymbolWord symbols;
    for (std::size_t v = 1; v != 0; v = parent[v]) {
      points.push_back(nodes[v]);
      symbols.push_back(via[v]);
    }
    points.push_back(x);
    std::reverse(points.begin(), points.end());
    std::reverse(symbols.begin(), symbols.end());
    result.chain = make_pseudo_orbit(ifs, std::move(points), std::move(symbols));
    result.note = "chain of " + std::to_string(result.chain->steps()) + " steps";
  } else if (result.box_path) {
    result.note = "box path exists but no point chain was realized at this resolution";
  } else {
    result.note = "no chain found at this resolution";
  }
  return result;
}

void write_edge_list(std::ostream& out, const ChainGraph& graph) {
  for (std::size_t v = 0; v < graph.size(); ++v)
    for (std::uint32_t w : graph.adjacency[v]) out << v << ' ' << w << '\n';
}

void write_recurrence_csv(std::ostream& out, const RecurrenceReport& report) {
  out << "box,component,recurrent\n";
  for (std::size_t v = 0; v < report.recurrent.size(); ++v)
    out << v << ',' << report.component[v] << ',' << int(report.recurrent[v]) << '\n';
}

}  // namespace avgshadow

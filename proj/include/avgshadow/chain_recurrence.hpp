#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "avgshadow/box_cover.hpp"
#include "avgshadow/pseudo_orbits.hpp"

namespace avgshadow {

constexpr std::size_t default_samples_per_box = 9;

/// Box-level ε-chain graph: B → B′ whenever some sample x ∈ B and some map
/// f_λ put f_λ(x) within ε + covering_radius(B′) of the center of B′.
/// Σ₂ systems with prepend maps are handled exactly on cylinders.
struct ChainGraph {
  std::shared_ptr<const BoxCover> cover;
  double epsilon = 0.0;
  std::size_t samples_per_box = default_samples_per_box;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, unique

  /// Every graph path realizes an (effective_epsilon)-chain of points.
  double effective_epsilon = 0.0;

  std::size_t size() const { return adjacency.size(); }
  std::size_t edge_count() const;
  bool has_edge(std::size_t from, std::size_t to) const;
};

ChainGraph build_chain_graph(const IFSystem& ifs, std::size_t resolution, double epsilon,
                             std::size_t samples_per_box = default_samples_per_box,
                             std::uint64_t seed = 0);

/// Strongly connected components of the chain graph. A box is recurrent iff
/// it lies on a directed cycle; chain components are the SCCs of recurrent
/// boxes. Component ids are numbered by smallest member box.
struct RecurrenceReport {
  std::vector<std::uint8_t> recurrent;
  std::vector<std::uint32_t> component;
  std::size_t scc_count = 0;
  std::size_t component_count = 0;
  std::size_t recurrent_count = 0;

  double recurrent_fraction() const;
};

RecurrenceReport analyze(const ChainGraph& graph);

struct ChainSearch {
  std::optional<PseudoOrbit> chain;  // each step error ≤ ε
  bool box_path = false;             // box-level reachability from box(x) to box(y)
  std::size_t resolution = 0;
  double epsilon = 0.0;
  std::string note;
};

/// ε-chain from x to y. An absent chain only means none was found at this
/// resolution.
ChainSearch find_chain(const IFSystem& ifs, const Point& x, const Point& y, double epsilon,
                       std::size_t resolution,
                       std::size_t samples_per_box = default_samples_per_box,
                       std::uint64_t seed = 0);

/// "from to" per line, box ids.
void write_edge_list(std::ostream& out, const ChainGraph& graph);
/// box,component,recurrent
void write_recurrence_csv(std::ostream& out, const RecurrenceReport& report);

}  // namespace avgshadow

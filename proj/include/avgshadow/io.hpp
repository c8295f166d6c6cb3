#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "avgshadow/shadowing.hpp"

namespace avgshadow {

/// Ordered key/value pairs echoed into report headers as "# key: value".
using Provenance = std::vector<std::pair<std::string, std::string>>;

// Pseudo-orbit table: header comments, then
//   index,symbol,point,alpha
// one record per point; the last record has empty symbol and alpha.
// Points use format_point (scalars; "x;y" for the plane; "01(10)" for Σ₂;
// "[a|b]" for products).
void write_pseudo_orbit(std::ostream& out, const IFSystem& ifs, const PseudoOrbit& orbit,
                        const Provenance& provenance = {});

/// Reads a table written by write_pseudo_orbit, recomputes the error ledger
/// against `ifs` and throws parse_error if it disagrees with the stored α.
PseudoOrbit read_pseudo_orbit(std::istream& in, const IFSystem& ifs);

// Shadow report: header comments with the scalar fields, then
//   n,distance,average,bound,cumulative_bound
// with n = 1 … horizon (bound columns empty when absent).
void write_shadow_report(std::ostream& out, const Space& space, const ShadowReport& report,
                         const Provenance& provenance = {});

void write_provenance(std::ostream& out, const Provenance& provenance);

/// Write via a temporary sibling file and rename; throws io_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace avgshadow

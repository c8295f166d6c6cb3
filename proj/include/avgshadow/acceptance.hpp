#pragma once

// Finite-horizon acceptance checks of the average-shadowing results. Each
// criterion produces one pass/fail line; the rendered report is a pure
// function of the seed (timings are kept out of it).

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace avgshadow::acceptance {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;  // deterministic measurements
  double seconds = 0.0;
};

struct Options {
  std::set<int> criteria;  // empty: all
  std::uint64_t seed = 20240601;
};

constexpr int criterion_count = 8;

std::vector<CriterionResult> run(const Options& options);
CriterionResult run_criterion(int id, std::uint64_t seed);

/// One "criterion N: PASS|FAIL title" line plus indented detail lines.
std::string render(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace avgshadow::acceptance

// Acceptance runner: one PASS/FAIL line per criterion, details indented.
// Usage: acceptance [criterion ids...] [--seed N]
#include <cstdint>
#include <iostream>
#include <string>

#include "avgshadow/acceptance.hpp"

int main(int argc, char** argv) {
  avgshadow::acceptance::Options options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--seed" && i + 1 < argc) {
      options.seed = std::stoull(argv[++i]);
    } else {
      options.criteria.insert(std::stoi(arg));
    }
  }
  const auto results = avgshadow::acceptance::run(options);
  for (const auto& r : results) {
    std::cout << "criterion " << r.id << ": " << (r.passed ? "PASS" : "FAIL") << "  " << r.title << "  ("
              << r.seconds << " s)\n";
    for (const auto& d : r.details) std::cout << "    " << d << '\n';
  }
  return avgshadow::acceptance::all_passed(results) ? 0 : 1;
}

#pragma once

#include <string>
#include <vector>

namespace avgshadow::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_analysis_failure = 1,
  exit_usage = 2,
  exit_io = 3,
};

/// Environment variable naming the default output directory.
inline constexpr const char* output_dir_env = "AVGSHADOW_OUTPUT_DIR";

/// Entry point shared by the executable and the tests; args excludes argv[0].
int dispatch(const std::vector<std::string>& args);

}  // namespace avgshadow::cli

#include <string>
#include <vector>

#include "avgshadow/cli.hpp"

int main(int argc, char** argv) {
  return avgshadow::cli::dispatch(std::vector<std::string>(argv + 1, argv + argc));
}

#include <vector>

#include "spttn/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spttn::run_cli(args);
}

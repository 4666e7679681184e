#include <iostream>
#include <string>
#include <vector>

#include "dbb/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dbb::cli::run(args, std::cout, std::cerr);
}

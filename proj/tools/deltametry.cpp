#include <iostream>
#include <string>
#include <vector>

#include "deltametry/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return deltametry::cli::main(args, std::cout, std::cerr);
}

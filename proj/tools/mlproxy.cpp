#include <iostream>
#include <string>
#include <vector>

#include "mlproxy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mlproxy::run_cli(args, std::cout, std::cerr);
}

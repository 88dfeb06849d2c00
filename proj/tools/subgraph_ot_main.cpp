#include <iostream>
#include <string>
#include <vector>

#include "subgraph_ot/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return subgraph_ot::run_cli(args, std::cout, std::cerr);
}

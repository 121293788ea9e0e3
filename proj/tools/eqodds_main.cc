#include <iostream>
#include <string>
#include <vector>

#include "eqodds/cli.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return eqodds::RunCli(args, std::cout, std::cerr);
}

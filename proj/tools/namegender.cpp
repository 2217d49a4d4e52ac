#include <iostream>
#include <string>
#include <vector>

#include "namegender/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return namegender::run_cli(args, std::cout, std::cerr);
}

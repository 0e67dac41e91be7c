#include <iostream>
#include <string>
#include <vector>

#include "dcmm/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dcmm::dispatch(args, std::cout, std::cerr);
}

#include <iostream>

#include "opval/cli.hpp"

int main(int argc, char** argv) {
  return opval::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}

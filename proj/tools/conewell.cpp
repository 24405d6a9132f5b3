#include <iostream>

#include "conewell/cli.hpp"

int main(int argc, char** argv) {
  return conewell::cli::run(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "pricelab/cli.hpp"

int main(int argc, char** argv) {
  return pricelab::cli::main(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  return dagsearch::cli::dispatch(argc, argv, std::cin, std::cout, std::cerr);
}

#include <iostream>

#include "edeen/cli.hpp"

int main(int argc, char** argv) {
  return edeen::cli::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}

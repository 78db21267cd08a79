#include <iostream>

#include "scrubber_ftc/cli.hpp"

int main(int argc, char** argv) {
  return scrubber_ftc::cli_main(argc, argv, std::cout, std::cerr);
}

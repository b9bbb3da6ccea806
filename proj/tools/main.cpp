#include <iostream>

#include "qho/cli.hpp"

int main(int argc, char** argv) {
  return qho::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}

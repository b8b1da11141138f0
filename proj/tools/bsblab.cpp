#include <iostream>
#include <string>
#include <vector>

#include "bsb/cli.hpp"
#include "bsb/errors.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return bsb::cli::run(bsb::cli::parse_args(args), std::cout, std::cerr);
  } catch (const bsb::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
}

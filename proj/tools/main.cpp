#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  tempo::cli::Io io{std::cin, std::cout, std::cerr};
  return tempo::cli::run(args, io);
}

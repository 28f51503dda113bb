#include <iostream>

#include "autgroup/cli.hpp"

int main(int argc, char **argv) {
  return autgroup::cli::run(argc, argv, std::cout, std::cerr);
}

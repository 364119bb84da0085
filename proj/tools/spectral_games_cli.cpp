#include <iostream>

#include "spectral_games/cli.hpp"

int main(int argc, char** argv) {
  return spectral_games::cli::cli_dispatch(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "tlim/cli.hpp"

int main(int argc, char **argv) { return tlim::cli::run(argc, argv, std::cout, std::cerr); }

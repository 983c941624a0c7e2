#include <iostream>

#include "distdim/cli/commands.hpp"

int main(int argc, char** argv) { return distdim::cli::run(argc, argv, std::cout, std::cerr); }

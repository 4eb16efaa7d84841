#include <iostream>

#include "mvdp/cli.hpp"

int main(int argc, char** argv) { return mvdp::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "pcactl/cli.hpp"

int main(int argc, char** argv) { return pcactl::cli_main(argc, argv, std::cout, std::cerr); }

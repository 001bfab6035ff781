#include "packbed/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return packbed::cli::run(argc, argv, std::cout, std::cerr); }

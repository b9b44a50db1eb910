#include "xrt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return xrt::cli::run(argc, argv, std::cout, std::cerr); }

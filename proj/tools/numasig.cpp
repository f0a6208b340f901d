#include <iostream>

#include "numasig/cli.hpp"

int main(int argc, char** argv) { return numasig::cli::run(argc, argv, std::cout, std::cerr); }

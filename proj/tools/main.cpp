#include "entproj/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return entproj::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return adiabat::cli::run(argc, argv, std::cout, std::cerr); }

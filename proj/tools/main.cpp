#include <iostream>

#include "pontryagin/cli.hpp"

int main(int argc, char** argv) { return pontryagin::cli::run_cli(argc, argv, std::cout, std::cerr); }

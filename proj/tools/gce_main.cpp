#include <iostream>

#include "geoctx/cli.hpp"

int main(int argc, char** argv) { return geoctx::run_cli(argc, argv, std::cout, std::cerr); }

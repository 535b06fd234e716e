#include <iostream>

#include "pgt/cli.hpp"

int main(int argc, char** argv) { return pgt::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "poa/cli.hpp"

int main(int argc, char** argv) { return poa::run_cli(argc, argv, std::cout, std::cerr); }

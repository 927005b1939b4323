#include <iostream>

#include "fkrank/cli.hpp"

int main(int argc, char** argv) { return fkrank::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "tnm/cli.hpp"

int main(int argc, char** argv) { return tnm::run_cli(argc, argv, std::cout, std::cerr); }

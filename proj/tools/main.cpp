#include <iostream>

#include "roughwave/cli.hpp"

int main(int argc, char** argv) { return roughwave::run_cli(argc, argv, std::cout, std::cerr); }

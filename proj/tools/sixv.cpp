#include "sixv/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sixv::run_cli(argc, argv, std::cout, std::cerr); }

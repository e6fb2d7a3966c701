#include <iostream>

#include "nsch/cli.hpp"

int main(int argc, char** argv) { return nsch::run_cli(argc, argv, std::cout, std::cerr); }

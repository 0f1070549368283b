#include "termdp/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return termdp::run_cli(argc, argv, std::cout, std::cerr); }

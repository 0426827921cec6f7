#include <iostream>

#include "delab/cli_runner.hpp"

int main(int argc, char** argv) { return delab::cli_main(argc, argv, std::cout, std::cerr); }

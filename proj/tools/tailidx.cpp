#include <iostream>

#include "tailidx/cli.hpp"

int main(int argc, char** argv) { return tailidx::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "tsl_cli/cli.hpp"

int main(int argc, char** argv) { return tsl::cli::run_cli(argc, argv, std::cout, std::cerr); }

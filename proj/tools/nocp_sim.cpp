#include <iostream>

#include "nocp/cli.hpp"

int main(int argc, char** argv) { return nocp::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) { return cdqn::cli::run(argc, argv, std::cout, std::cerr); }

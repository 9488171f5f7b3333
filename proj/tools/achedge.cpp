#include <iostream>

#include "achedge/cli.hpp"

int main(int argc, char** argv) { return achedge::cli::run(argc, argv, std::cout, std::cerr); }

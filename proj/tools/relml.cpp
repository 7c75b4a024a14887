#include <iostream>

#include "relml/cli.hpp"

int main(int argc, char** argv) { return relml::cli::run(argc, argv, std::cout, std::cerr); }

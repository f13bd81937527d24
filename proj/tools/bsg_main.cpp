#include <iostream>

#include "bsg/commands.hpp"

int main(int argc, char** argv) { return bsg::cli::run(argc, argv, std::cout, std::cerr); }

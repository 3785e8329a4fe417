#include <iostream>

#include "splitbox/cli.hpp"

int main(int argc, char** argv) { return splitbox::run_cli(argc, argv, std::cout, std::cerr); }

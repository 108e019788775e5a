#include <iostream>

#include "diffzoom/cli.hpp"

int main(int argc, char** argv) { return diffzoom::run_cli(argc, argv, std::cout, std::cerr); }

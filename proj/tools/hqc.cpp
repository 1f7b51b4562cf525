#include <iostream>

#include "hqc/cli.hpp"

int main(int argc, char** argv) { return hqc::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "swarmform/harness/cli.hpp"

int main(int argc, char** argv) { return swarmform::harness::run_cli(argc, argv, std::cout, std::cerr); }

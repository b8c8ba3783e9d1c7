#include <iostream>

#include "pedrole/cli.hpp"

int main(int argc, char** argv) { return pedrole::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "fakelens/cli.hpp"

int main(int argc, char** argv) { return fakelens::run_cli(argc, argv, std::cout, std::cerr); }

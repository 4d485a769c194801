#include <iostream>

#include "rqmc/cli.hpp"

int main(int argc, char** argv) { return rqmc::cli::main(argc, argv, std::cout, std::cerr); }

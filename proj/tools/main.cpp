#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return rcrank::cli::run(argc, argv, std::cout, std::cerr); }

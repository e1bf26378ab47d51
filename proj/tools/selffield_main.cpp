#include <iostream>

#include "selffield/cli.hpp"

int main(int argc, char** argv) { return selffield::cli::main_entry(argc, argv, std::cout, std::cerr); }

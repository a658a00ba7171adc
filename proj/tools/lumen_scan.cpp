#include <iostream>

#include "lumen/harness.hpp"

int main(int argc, char** argv) { return lumen::cli_main(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "nmstretch/cli.hpp"

int main(int argc, char** argv) { return nmstretch::stretch_main(argc, argv, std::cout, std::cerr); }

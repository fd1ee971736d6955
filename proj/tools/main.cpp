#include <iostream>

#include "matryoshka/cli.hpp"

int main(int argc, char** argv) { return matryoshka::run(argc, argv, std::cout, std::cerr); }

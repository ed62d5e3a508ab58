#include <iostream>

#include "uuqc/cli.hpp"

int main(int argc, char **argv) { return uuqc::cli::dispatch(argc, argv, std::cout, std::cerr); }

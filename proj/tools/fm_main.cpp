#include <iostream>

#include "fm/cli.hpp"

int main(int argc, char** argv) {
    return fm::run_cli(argc, argv, std::cout, std::cerr);
}

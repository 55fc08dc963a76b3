#include <iostream>

#include "safeset/cli.hpp"

int main(int argc, char** argv) {
    return safeset::cli::run(argc, argv, std::cout, std::cerr);
}

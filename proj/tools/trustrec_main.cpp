#include <iostream>

#include "trustrec/cli.hpp"

int main(int argc, char** argv) {
    return trustrec::run_cli(argc, argv, std::cout, std::cerr);
}

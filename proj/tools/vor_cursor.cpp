#include <iostream>

#include "vorcursor/cli.hpp"

int main(int argc, char** argv) {
    return vorcursor::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

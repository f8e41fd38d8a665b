#include <iostream>
#include <string>
#include <vector>

#include "ltree/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return ltree::run_cli(args, std::cout, std::cerr);
}

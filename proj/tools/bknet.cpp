#include <iostream>
#include <string>
#include <vector>

#include "bknet/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bknet::run(args, std::cout, std::cerr);
}

#include <iostream>

#include "lqfn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lqfn::run_cli(args, std::cout, std::cerr);
}

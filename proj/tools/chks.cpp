#include "chks/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return chks::runCli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "rangecap/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return rangecap::run_cli(args, std::cout, std::cerr);
}

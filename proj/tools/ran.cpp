#include <iostream>

#include "ran/cli.hpp"

int main(int argc, char** argv)
{
    return ran::run_cli(argc, argv, std::cin, std::cout, std::cerr);
}

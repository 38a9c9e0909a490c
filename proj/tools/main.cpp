// casefile - offline artifact analysis workbench

#include <casefile/cli/cli.hpp>

#include <cstdlib>
#include <iostream>

#include <unistd.h>

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    casefile::CliEnvironment env;
    env.color = std::getenv("NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
    return casefile::run_cli(args, std::cout, std::cerr, env);
}

#include <string>
#include <vector>

#include "prevalence/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return prevalence::cli::run_cli(args);
}

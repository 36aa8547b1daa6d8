#include <string>
#include <vector>

#include "poseq/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return poseq::cli::dispatch(std::move(args));
}

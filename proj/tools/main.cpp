#include "havoq/cli.hpp"

int main(int argc, char** argv) {
    return havoq::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}

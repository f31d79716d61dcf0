#include "webforge/cli.hpp"

int main(int argc, char** argv) {
    return webforge::run_cli(argc, argv);
}

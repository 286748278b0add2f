#include "lohe/cli.hpp"

int main(int argc, char** argv) { return lohe::run_cli(argc, argv); }

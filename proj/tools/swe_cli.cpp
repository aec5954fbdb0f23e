#include "swelab/cli.hpp"

int main(int argc, char** argv) { return swelab::run_cli(argc, argv); }

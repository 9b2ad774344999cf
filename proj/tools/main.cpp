#include "fdmlens/cli.hpp"

int main(int argc, char** argv) { return fdmlens::run_cli(argc, argv); }

#include "ductmc/cli.hpp"

int main(int argc, char** argv) { return ductmc::run_cli(argc, argv); }

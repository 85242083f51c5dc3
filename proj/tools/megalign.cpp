#include "megalign/cli.hpp"

int main(int argc, char **argv) { return megalign::run_cli(argc, argv); }

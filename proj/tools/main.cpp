#include "polariton/cli.hpp"

int main(int argc, char** argv) { return polariton::cli_main(argc, argv); }

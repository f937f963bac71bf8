#include "negata/cli.hpp"

int main(int argc, char** argv) { return negata::run_cli(argc, argv); }

#include "smaflow/cli.hpp"

int main(int argc, char** argv) { return smaflow::cli_main(argc, argv); }

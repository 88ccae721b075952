#include "aharm/cli_runner.hpp"

int main(int argc, char** argv) { return aharm::cli::run_cli(argc, argv); }

#include "housim_cli/commands.hpp"

int main(int argc, char** argv) { return housim::cli::run(argc, argv); }

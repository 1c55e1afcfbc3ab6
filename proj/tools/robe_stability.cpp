#include "cli_commands.hpp"

int main(int argc, char** argv) { return robe::cli::run(argc, argv); }

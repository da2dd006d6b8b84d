#include "jsaforge_cli/commands.hpp"

int main(int argc, char** argv) { return jsaforge::cli::run_cli(argc, argv); }

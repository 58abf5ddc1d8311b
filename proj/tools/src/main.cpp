#include "convser/cli/cli.hpp"

int main(int argc, char** argv) { return convser::cli::run(argc, argv); }

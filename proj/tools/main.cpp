#include "cli.hpp"

int main(int argc, char** argv) { return agres::cli::main(argc, argv); }

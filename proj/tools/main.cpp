#include "cli.hpp"

int main(int argc, char** argv) { return archimedes::cli::run(argc, argv); }

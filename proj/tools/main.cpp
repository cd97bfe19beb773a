#include "cli.hpp"
int main(int argc, char** argv) { return dipe::cli::run(argc, argv); }

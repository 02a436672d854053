#include "charpipe/cli.hpp"

int main(int argc, char** argv) { return charpipe::cli::run(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return kleinian::cli::run(argc, argv); }

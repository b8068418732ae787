#include "mbg/cli.hpp"

int main(int argc, char** argv) { return mbg::cli::run(argc, argv); }

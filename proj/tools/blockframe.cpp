#include "blockframe/cli.hpp"

int main(int argc, char** argv) { return blockframe::cli::run(argc, argv); }

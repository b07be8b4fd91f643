#include "recipnet/cli.hpp"

int main(int argc, char** argv) { return recipnet::cli::run(argc, argv); }

#include "cli.hpp"

int main(int argc, char** argv) { return fracmix::cli::run(argc, argv); }

#include "qswn/cli.hpp"

int main(int argc, char** argv) { return qswn::cli::run(argc, argv); }

#include "qpflag/cli.hpp"

int main(int argc, char** argv) { return qpflag::cli::run(argc, argv); }

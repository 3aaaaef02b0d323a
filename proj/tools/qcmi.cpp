#include "qcmi/cli.hpp"

int main(int argc, char** argv) { return qcmi::cli::main(argc, argv); }

#include "dtnsim/harness.hpp"

int main(int argc, char** argv) { return dtnsim::run_cli(argc, argv); }

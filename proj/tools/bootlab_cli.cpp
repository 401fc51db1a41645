#include "bootlab/harness.hpp"

int main(int argc, char** argv) { return bootlab::cli_main(argc, argv); }

#include "evanescent/harness.hpp"

int main(int argc, char** argv) { return evanescent::cli_main(argc, argv); }

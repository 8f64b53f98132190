#include "abridge/runner.hpp"

int main(int argc, char** argv) { return abridge::runner::cli_main(argc, argv); }

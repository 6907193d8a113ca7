#include "densub/cli.hpp"

int main(int argc, char** argv) { return densub::cli_dispatch(argc, argv); }

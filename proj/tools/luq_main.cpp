#include "luq/cli.hpp"

int main(int argc, char** argv) { return luq::run_cli(argc, argv); }

#include "ksum/cli.hpp"

int main(int argc, char** argv) { return ksum::run_cli(argc, argv); }

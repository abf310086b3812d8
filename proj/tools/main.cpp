#include "iarc/cli.hpp"

int main(int argc, char** argv) { return iarc::run_cli(argc, argv); }

#include "bmd/commands.hpp"

int main(int argc, char** argv) { return bmd::run_cli(argc, argv); }

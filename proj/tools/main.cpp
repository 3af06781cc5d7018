#include "imphedge/commands.hpp"

int main(int argc, char** argv) { return imphedge::run_cli(argc, argv); }

#include "fogplace/cli.hpp"

int main(int argc, char** argv) { return fogplace::cli_main(argc, argv); }

#include "mtbp/cli.hpp"

int main(int argc, char** argv) { return mtbp::run_cli(argc, argv); }

#include "etlmsc/cli.hpp"

int main(int argc, char** argv) { return etlmsc::run_cli(argc, argv); }

#include "qpp/cli.hpp"

int main(int argc, char** argv) { return qpp::run_cli(argc, argv); }

#include "carleman/cli.hpp"

int main(int argc, char** argv) { return carleman::run_cli(argc, argv); }

#include "cli/app.hpp"

int main(int argc, char** argv) { return qlidar::cli::run_cli(argc, argv); }

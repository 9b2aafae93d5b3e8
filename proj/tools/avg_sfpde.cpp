#include "avgsfpde/cli.hpp"

int main(int argc, char** argv) { return avgsfpde::cli::run(argc, argv); }

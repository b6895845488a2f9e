#include "dislo/cli.hpp"

int main(int argc, char** argv) { return dislo::cli::run(argc, argv); }

#include "formal/cli.hpp"

int main(int argc, char** argv) { return formal::cli::run(argc, argv); }

#include "commands.hpp"

int main(int argc, char** argv) { return rieszlab::cli::run(argc, argv); }

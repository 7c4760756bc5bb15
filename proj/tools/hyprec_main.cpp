#include "hyprec/cli.hpp"

int main(int argc, char** argv) { return hyprec::cli::run(argc, argv); }

#include "lowres/cli.hpp"

int main(int argc, char** argv) { return lowres::run(argc, argv); }

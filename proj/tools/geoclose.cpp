#include "geoclose/cli.hpp"

int main(int argc, char** argv) { return geoclose::cli::main(argc, argv); }

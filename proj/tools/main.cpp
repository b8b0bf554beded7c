#include "signsynth/cli.hpp"

int main(int argc, char** argv) { return signsynth::run_cli(argc, argv); }

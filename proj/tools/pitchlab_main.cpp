#include "pitchlab/cli.hpp"

int main(int argc, char** argv) { return pitchlab::cli::run(argc, argv); }

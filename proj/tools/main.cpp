#include "cli.hpp"

int main(int argc, char** argv) { return wkam::cli::run(argc, argv); }

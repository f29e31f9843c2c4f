#include "dome/cli.hpp"

int main(int argc, char** argv) { return dome::cli::run(argc, argv); }

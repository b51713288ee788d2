#include "ellstar/cli.hpp"

int main(int argc, char** argv) { return ellstar::run(argc, argv); }

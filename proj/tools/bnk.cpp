#include "bnk/cli.hpp"

int main(int argc, char** argv) { return bnk::run(argc, argv); }

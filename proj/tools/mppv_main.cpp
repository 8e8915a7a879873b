#include "mppv/cli.hpp"

int main(int argc, char** argv) { return mppv::run_cli(argc, argv); }

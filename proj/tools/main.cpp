#include "gs2d/cli.hpp"

int main(int argc, char** argv) { return gs2d::run_cli(argc, argv); }

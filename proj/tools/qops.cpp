#include "qops/cli.hpp"

int main(int argc, char** argv) { return qops::dispatch(argc, argv); }

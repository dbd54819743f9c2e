#include "innerforge/cli.hpp"

int main(int argc, char** argv) { return innerforge::run(argc, argv); }

#include "kmgr_cli/commands.hpp"

int main(int argc, char** argv) { return kmgr::cli::run(argc, argv); }

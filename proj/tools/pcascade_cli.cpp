#include "pcascade/cli/app.hpp"

int main(int argc, char** argv) { return pcascade::cli::run(argc, argv); }

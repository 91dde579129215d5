#include <chaoskit/cli/app.hpp>

int main(int argc, char** argv) { return chaoskit::cli::run(argc, argv); }

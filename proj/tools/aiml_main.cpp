#include "aiml/cli.hpp"

int main(int argc, char** argv) { return aiml::cli::run(argc, argv); }

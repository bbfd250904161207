#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return latent_reach::cli::run(argc, argv, std::cout, std::cerr); }

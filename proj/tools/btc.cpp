// btc — command-line front end; all logic lives in btc_cli.

#include "btc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return btc::cli::main_entry(argc, argv, std::cout, std::cerr);
}

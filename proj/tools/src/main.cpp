#include <iostream>

#include "cbrisk_cli/app.h"

int main(int argc, char** argv) {
    return cbrisk::cli::run({argv, argv + argc}, std::cout, std::cerr);
}

#include <clocale>

#include "spectral/cli.hpp"

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C"); // byte-stable numeric formatting
    return spectral::cli::main_entry(argc, argv);
}

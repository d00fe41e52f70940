#include <iostream>
#include <string>
#include <vector>

#include "lab_app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ncp::lab::run_lab(std::move(args), std::cout, std::cerr);
}

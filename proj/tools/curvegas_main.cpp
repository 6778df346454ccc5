#include "curvegas/runner.hpp"

int main(int argc, char** argv) {
    return curvegas::main_entry(argc, argv);
}

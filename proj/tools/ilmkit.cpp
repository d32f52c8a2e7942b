#include "ilmkit/driver.hpp"

int main(int argc, char** argv) { return ilm::cli::run(argc, argv); }

#include "glassfrac/pipeline.hpp"

int main(int argc, char** argv) { return glassfrac::cli_main(argc, argv); }

#include <cstdio>

#include "CLI11.hpp"
#include "batchalloc/regularizers.hpp"

int main(int argc, char** argv) {
  CLI::App app{"batchalloc: multi-stage bipartite allocation toolkit"};
  app.require_subcommand(0, 1);
  CLI11_PARSE(app, argc, argv);
  std::printf("gamma(2) = %.6f\n", batchalloc::gamma(2));
  return 0;
}

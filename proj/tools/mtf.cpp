// Experiment driver; subcommands are filled in as the library grows.
#include <cstdio>

int main() {
  std::fprintf(stderr, "mtf: no subcommands wired up yet\n");
  return 2;
}

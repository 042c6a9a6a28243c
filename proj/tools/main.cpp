#include <CLI11.hpp>

#include <cstdio>

int main(int argc, char** argv) {
  CLI::App app{"generalized Ornstein-Uhlenbeck inequality checker"};
  app.require_subcommand(0, 1);
  CLI11_PARSE(app, argc, argv);
  std::puts("no command given; see --help");
  return 0;
}

#include "mdk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mdk::cli::run_command(args);
}

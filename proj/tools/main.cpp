#include <cstdio>

#include "levymc/cli.hpp"

int main(int argc, char** argv) {
  const levymc::CommandOutput res =
      levymc::run_command(std::vector<std::string>(argv + 1, argv + argc));
  std::fputs(res.out.c_str(), stdout);
  std::fputs(res.err.c_str(), stderr);
  return res.code;
}

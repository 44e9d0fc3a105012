#include <CLI11.hpp>

#include <iostream>

#include "boomerang/wire.hpp"

using namespace boomerang;

int main(int argc, char** argv) {
  CLI::App app{"End-to-end benchmark"};
  BenchConfig cfg;
  std::string cycle = "secp-secq";
  app.add_option("--users", cfg.users)->capture_default_str();
  app.add_option("--catalogue", cfg.catalogue)->capture_default_str();
  app.add_option("--reps", cfg.reps)->capture_default_str();
  app.add_option("--cycle", cycle, "secp-secq, mid-toy, toy or toy:N")->capture_default_str();
  app.add_flag("--tcp", cfg.tcp, "Loopback socket instead of an in-process channel");
  CLI11_PARSE(app, argc, argv);
  try {
    cfg.cycle = CycleChoice::parse(cycle);
    std::cout << format_bench(bench(cfg));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

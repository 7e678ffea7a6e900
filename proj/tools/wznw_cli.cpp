// wznw-cli: batch front end. Reads a config, validates every task, runs them
// and writes one output file set per task plus summary.txt.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "wznw/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"WZNW four-point and VOA verification runner"};
  std::string config_path, out;
  std::optional<unsigned> precision;
  std::optional<long> series_order, depth;
  bool parallel = false;
  app.add_option("--config", config_path, "task configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--precision", precision, "working precision in decimal digits");
  app.add_option("--series-order", series_order, "Frobenius series truncation order M");
  app.add_option("--depth", depth, "VOA depth bound D");
  app.add_option("--out", out, "output directory");
  app.add_flag("--parallel", parallel, "run tasks concurrently");
  CLI11_PARSE(app, argc, argv);

  std::ifstream in(config_path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    auto cfg = wznw::cli::parse_config(buf.str());
    if (precision) cfg.precision = *precision;
    if (series_order) cfg.series_order = *series_order;
    if (depth) cfg.depth = *depth;
    if (!out.empty()) cfg.output = out;
    cfg.parallel = parallel;
    const auto outcome = wznw::cli::run(cfg);
    std::cout << outcome.summary;
    return outcome.pass ? 0 : 1;
  } catch (const wznw::cli::ConfigError& e) {
    std::cerr << "config error(s) in " << config_path << ":\n";
    for (const auto& p : e.problems()) std::cerr << "  " << p << "\n";
    return 2;
  }
}

#include <iostream>

#include <CLI11.hpp>

#include "cpsurf/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = cpsurf::cli;
  CLI::App app{"Surfaces in su(N) from CP^(N-1) sigma model solutions"};
  std::string config_path, command, point, out_dir;
  app.add_option("--config", config_path, "run configuration (JSON)")->required();
  app.add_option("--command", command, "what to compute")
      ->required()
      ->check(CLI::IsMember({"check", "geometry", "immerse", "frame", "willmore"}));
  app.add_option("--point", point, "xiL,xiR for the frame command");
  app.add_option("--out", out_dir, "output directory (default: config out_dir or .)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  cli::RunConfig cfg;
  try {
    cfg = cli::load_config(config_path);
    if (!point.empty()) cfg.point = cli::parse_point(point);
  } catch (const cpsurf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e.kind());
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  return cli::run_command(command, cfg, std::cout, std::cerr);
}

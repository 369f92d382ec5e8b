// fockprep: sudden trap-reduction counting statistics from the command line.
//
//   fockprep spectrum --config trap.json
//   fockprep counting --config scenario.json --out results
//   fockprep sweep    --config sweep.json --threads 4
//   fockprep figure fig2 --out figures

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fockprep/cli.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw fockprep::ConfigError("", "cannot read config file '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Counting statistics of atoms kept after a sudden trap reduction", "fockprep"};
  app.set_version_flag("--version", std::string(fockprep::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> grid_points;
  std::optional<unsigned> threads;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--grid-points", grid_points, "fixed number of grid points (>= 3)");
  app.add_option("--threads", threads, "worker threads for sweeps (>= 1)");
  app.add_flag("--verbose", verbose, "progress on stderr");

  auto* spectrum = app.add_subcommand("spectrum", "bound spectrum of one trap");
  auto* counting = app.add_subcommand("counting", "number distribution after one reduction");
  auto* sweep = app.add_subcommand("sweep", "width-ratio, mu/kT or smoothness sweep");
  auto* figure = app.add_subcommand("figure", "reproduce a reference figure");
  std::string figure_name;
  figure->add_option("name", figure_name, "fig2, fig3, fig4 or fig5")->required();
  for (auto* sub : {spectrum, counting, sweep, figure}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fockprep::kExitConfig;
  }

  using fockprep::Command;
  Command command = Command::spectrum;
  if (counting->parsed()) command = Command::counting;
  if (sweep->parsed()) command = Command::sweep;
  if (figure->parsed()) command = Command::figure;

  fockprep::RunConfig config;
  try {
    const std::string text = config_path.empty() ? std::string() : read_file(config_path);
    config = fockprep::parse_config(
        text, command, figure->parsed() ? std::optional(figure_name) : std::nullopt);
    if (out_dir) {
      if (out_dir->empty()) throw fockprep::ConfigError("--out", "must not be empty");
      config.output_dir = *out_dir;
    }
    if (grid_points) {
      if (*grid_points < 3) throw fockprep::ConfigError("--grid-points", "must be >= 3");
      config.grid.n_points = *grid_points;
    }
    if (threads) {
      if (*threads < 1) throw fockprep::ConfigError("--threads", "must be >= 1");
      config.threads = *threads;
    }
    config.verbose = config.verbose || verbose;
  } catch (const fockprep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return fockprep::kExitConfig;
  }
  return fockprep::run(config, std::cerr);
}

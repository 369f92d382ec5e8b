#pragma once

// Runs a validated configuration and writes the CSV artifacts.
//
// Every file starts with '#'-prefixed metadata lines (tool version, U
// convention, the full configuration with defaults, the grid, scalar results
// and warnings), followed by one header row and the data rows. Numbers are
// printed with 12 significant digits.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fockprep/config.hpp"
#include "fockprep/errors.hpp"
#include "fockprep/experiments.hpp"
#include "fockprep/figures.hpp"

#ifndef FOCKPREP_VERSION
#define FOCKPREP_VERSION "0.1.0"
#endif

namespace fockprep {

inline constexpr std::string_view kVersion = FOCKPREP_VERSION;

enum ExitCode : int { kExitOk = 0, kExitNumerical = 1, kExitConfig = 2 };

inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

/// One output file, built in memory.
class CsvArtifact {
 public:
  CsvArtifact(std::string name, std::vector<std::string> columns)
      : name_(std::move(name)), columns_(std::move(columns)) {}

  void meta(const std::string& key, const std::string& value) {
    meta_.push_back("# " + key + ": " + value);
  }
  void meta(const std::string& key, double value) { meta(key, format_number(value)); }
  void meta(const std::string& key, std::size_t value) { meta(key, std::to_string(value)); }
  void grid(const Grid& g) {
    meta("grid", "n_points=" + std::to_string(g.size()) + " x_min=" + format_number(g[0]) +
                     " x_max=" + format_number(g[g.size() - 1]) +
                     " spacing=" + format_number(g.spacing()));
  }
  void warnings(const std::vector<std::string>& w) {
    for (const auto& s : w) meta("warning", s);
  }

  template <class... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
    rows_.push_back(std::move(line));
  }

  const std::string& name() const noexcept { return name_; }

  std::string render(const RunConfig& config) const {
    std::string out;
    out += "# fockprep " + std::string(kVersion) + "\n";
    out += "# u_convention: " + std::string(kUConvention) + "\n";
    out += "# config: " + emit_config(config, -1) + "\n";
    for (const auto& m : meta_) out += m + "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += "\n";
    for (const auto& r : rows_) out += r + "\n";
    return out;
  }

 private:
  static std::string cell(double x) { return format_number(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "1" : "0"; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::string> meta_;
  std::vector<std::string> rows_;
};

namespace detail {

inline std::string artifact_name(const RunConfig& c, const std::string& suffix = "") {
  return std::string(to_string(c.command)) + "_" + c.tag + suffix + ".csv";
}

inline void occupation_meta(CsvArtifact& a, const OccupationState& occ) {
  a.meta("particles", occ.particle_number);
  a.meta("temperature", occ.temperature);
  if (occ.chemical_potential) a.meta("chemical_potential", *occ.chemical_potential);
}

inline void distribution(CsvArtifact& a, const ScenarioResult& r) {
  a.grid(r.grid);
  a.meta("initial_capacity", r.initial_capacity);
  a.meta("final_capacity", r.final_capacity);
  occupation_meta(a, r.occupation);
  a.meta("mean", r.statistics.mean);
  a.meta("variance", r.statistics.variance);
  a.meta("kappa3", r.statistics.cumulants[2]);
  a.meta("min_eigenvalue", r.fock.min_eigenvalue);
  a.meta("fock_satisfied", r.fock.satisfied ? "true" : "false");
  a.meta("p_full", r.full_trap_probability());
  a.meta("cross_check_error", r.cross_check_error);
  a.warnings(r.warnings);
  for (std::size_t n = 0; n < r.statistics.probabilities.size(); ++n)
    a.row(n, r.statistics.probabilities[n]);
}

inline void width_sweep_rows(CsvArtifact& a, const SweepResult& s) {
  for (const auto& row : s.rows)
    a.row(row.parameter, row.mean, row.variance, row.min_eigenvalue, row.full_trap_probability,
          row.final_capacity, row.fock_satisfied);
}

inline const std::vector<std::string> kWidthColumns = {
    "width_ratio", "mean", "variance", "min_eigenvalue", "p_full", "final_capacity", "fock_satisfied"};

inline std::vector<CsvArtifact> spectrum(const RunConfig& c) {
  const auto trap = make_trap(*c.trap);
  const auto solve = solve_options(c);
  const auto grid = automatic_grid(trap, grid_policy(c), solve);
  const auto s = solve_bound_states(trap, grid, solve);
  CsvArtifact a(artifact_name(c), {"level", "energy", "parity"});
  a.grid(grid);
  a.meta("depth", trap.depth());
  a.meta("U", dimensionless_depth(trap));
  a.meta("capacity", s.capacity());
  a.meta("threshold", s.threshold);
  if (!s.near_threshold.empty())
    a.warnings({std::to_string(s.near_threshold.size()) + " level(s) within the threshold band excluded"});
  for (std::size_t k = 0; k < s.capacity(); ++k)
    a.row(k + 1, s.energies[k], std::string(to_string(parity(s, k))));
  return {a};
}

inline std::vector<CsvArtifact> counting(const RunConfig& c) {
  CsvArtifact a(artifact_name(c), {"n", "probability"});
  distribution(a, run_scenario(make_scenario(c)));
  return {a};
}

inline std::vector<CsvArtifact> sweep(const RunConfig& c) {
  const auto& w = *c.sweep;
  if (w.parameter == SweepParameter::smoothness) {
    const auto trap = make_trap(*c.trap);
    std::vector<double> sigmas;
    for (double s : w.values) sigmas.push_back(s * trap.half_width());
    const auto rows = capacity_vs_smoothness(trap.depth(), trap.half_width(), sigmas, grid_policy(c),
                                             solve_options(c), c.threads);
    CsvArtifact a(artifact_name(c), {"relative_smoothness", "capacity", "top_gap"});
    a.meta("depth", trap.depth());
    a.meta("half_width", trap.half_width());
    for (std::size_t i = 0; i < rows.size(); ++i) a.row(w.values[i], rows[i].capacity, rows[i].top_gap);
    return {a};
  }
  const auto base = make_scenario(c);
  if (w.parameter == SweepParameter::width_ratio) {
    const auto s = sweep_width_ratio(base, w.values, c.threads);
    CsvArtifact a(artifact_name(c), kWidthColumns);
    a.grid(s.grid);
    a.meta("initial_capacity", s.initial_capacity);
    occupation_meta(a, s.occupation);
    a.warnings(s.warnings);
    width_sweep_rows(a, s);
    return {a};
  }
  const auto t = temperature_sweep(base, w.values, w.ratios, c.threads);
  CsvArtifact a(artifact_name(c), {"mu_over_kT", "temperature", "chemical_potential", "plateau_mean",
                                   "plateau_ratio", "top_level_weight"});
  a.grid(t.sweeps.front().grid);
  a.meta("initial_capacity", t.sweeps.front().initial_capacity);
  for (const auto& s : t.sweeps) a.warnings(s.warnings);
  for (const auto& r : t.rows)
    a.row(r.mu_over_kT, r.temperature, r.chemical_potential, r.plateau_mean, r.plateau_ratio,
          r.top_level_weight);
  CsvArtifact b(artifact_name(c, "_rows"), {"mu_over_kT", "width_ratio", "mean", "variance",
                                            "min_eigenvalue", "p_full", "final_capacity"});
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    for (const auto& row : t.sweeps[i].rows)
      b.row(t.rows[i].mu_over_kT, row.parameter, row.mean, row.variance, row.min_eigenvalue,
            row.full_trap_probability, row.final_capacity);
  return {a, b};
}

inline std::vector<CsvArtifact> figure(const RunConfig& c) {
  const auto policy = grid_policy(c);
  const auto solve = solve_options(c);
  const std::string& f = *c.figure;
  std::vector<CsvArtifact> out;
  if (f == "fig2") {
    const auto results = figures::fig2(policy, solve, c.threads);
    for (std::size_t i = 0; i < results.size(); ++i) {
      CsvArtifact a(std::string("figure_") + figures::kFig2Panels[i] + ".csv", {"n", "probability"});
      a.meta("width_ratio", figures::kFig2Ratios[i]);
      distribution(a, results[i]);
      out.push_back(std::move(a));
    }
  } else if (f == "fig3") {
    const auto rows = figures::fig3(policy, solve, c.threads);
    CsvArtifact a("figure_fig3.csv", {"relative_smoothness", "capacity", "top_gap"});
    CsvArtifact b("figure_fig3_levels.csv", {"relative_smoothness", "level", "energy"});
    a.meta("depth", figures::kFig3Depth);
    b.meta("depth", figures::kFig3Depth);
    for (const auto& r : rows) {
      a.row(r.smoothness, r.capacity, r.top_gap);
      for (std::size_t k = 0; k < r.energies.size(); ++k) b.row(r.smoothness, k + 1, r.energies[k]);
    }
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  } else if (f == "fig4") {
    const auto families = figures::fig4_families();
    const auto sweeps = figures::fig4(policy, solve, c.threads);
    std::vector<std::string> columns{"family"};
    columns.insert(columns.end(), kWidthColumns.begin(), kWidthColumns.end());
    CsvArtifact a("figure_fig4.csv", columns);
    for (std::size_t i = 0; i < sweeps.size(); ++i) {
      const auto window = figures::low_variance_window(sweeps[i], 1e-2);
      a.meta(families[i].label, "initial_capacity=" + std::to_string(sweeps[i].initial_capacity) +
                                    " n_points=" + std::to_string(sweeps[i].grid.size()) +
                                    " variance<1e-2 window=[" + format_number(window.first) + "," +
                                    format_number(window.second) + "]");
      for (const auto& w : sweeps[i].warnings) a.meta("warning", families[i].label + ": " + w);
      for (const auto& row : sweeps[i].rows)
        a.row(families[i].label, row.parameter, row.mean, row.variance, row.min_eigenvalue,
              row.full_trap_probability, row.final_capacity, row.fock_satisfied);
    }
    out.push_back(std::move(a));
  } else {
    const auto r = figures::fig5(policy, solve, c.threads);
    CsvArtifact a("figure_fig5.csv", {"initial_c", "temperature", "mu_over_kT", "chemical_potential",
                                      "plateau_mean", "plateau_ratio", "top_level_weight"});
    CsvArtifact b("figure_fig5_sweeps.csv",
                  {"initial_c", "temperature", "width_ratio", "mean", "variance", "p_full"});
    a.meta("particles", figures::kFig5Particles);
    for (const auto& row : r.standard.rows)
      a.row(100, row.temperature, row.mu_over_kT, row.chemical_potential, row.plateau_mean,
            row.plateau_ratio, row.top_level_weight);
    for (const auto& s : r.deeper) {
      const auto& best = plateau_row(s);
      const double t = s.occupation.temperature;
      const double mu = *s.occupation.chemical_potential;
      a.row(130, t, (mu + s.base.initial.depth()) / t, mu, best.mean, best.parameter,
            s.occupation.weights.back());
    }
    for (std::size_t i = 0; i < r.standard.sweeps.size(); ++i) {
      for (const auto& row : r.standard.sweeps[i].rows)
        b.row(100, r.standard.rows[i].temperature, row.parameter, row.mean, row.variance,
              row.full_trap_probability);
    }
    for (const auto& s : r.deeper)
      for (const auto& row : s.rows)
        b.row(130, s.occupation.temperature, row.parameter, row.mean, row.variance,
              row.full_trap_probability);
    for (const auto& s : r.standard.sweeps) a.warnings(s.warnings);
    for (const auto& s : r.deeper) a.warnings(s.warnings);
    out.push_back(std::move(a));
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace detail

/// Computes all artifacts for a configuration without touching the disk.
inline std::vector<CsvArtifact> compute_artifacts(const RunConfig& c) {
  switch (c.command) {
    case Command::spectrum: return detail::spectrum(c);
    case Command::counting: return detail::counting(c);
    case Command::sweep: return detail::sweep(c);
    case Command::figure: return detail::figure(c);
  }
  return {};
}

/// Runs `c`, writing files into c.output_dir. Returns 0 on success, 1 on a
/// numerical failure, 2 on invalid parameters.
inline int run(const RunConfig& c, std::ostream& log) {
  try {
    if (c.verbose) log << "fockprep " << kVersion << ": " << to_string(c.command) << " '" << c.tag << "'\n";
    const auto artifacts = compute_artifacts(c);
    std::filesystem::create_directories(c.output_dir);
    for (const auto& a : artifacts) {
      const auto path = std::filesystem::path(c.output_dir) / a.name();
      std::ofstream out(path, std::ios::binary);
      out << a.render(c);
      if (!out) throw NumericalError("could not write " + path.string());
      if (c.verbose) log << "wrote " << path.string() << "\n";
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InvalidParameter& e) {
    log << "invalid parameter: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace fockprep

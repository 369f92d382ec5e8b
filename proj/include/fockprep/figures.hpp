#pragma once

// Parameter sets of the reference figures and the computations behind them.
// All lengths in units of the initial half-width L_i = 1.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "fockprep/experiments.hpp"

namespace fockprep::figures {

inline constexpr double pi = std::numbers::pi;

/// Trap filled up to its capacity on the automatic grid.
inline GroundOccupation filled(const TrapSpec& trap, const GridPolicy& policy,
                               const SolveOptions& solve) {
  return GroundOccupation{capacity(trap, automatic_grid(trap, policy, solve), solve)};
}

// Distributions for squeezing only, the combined protocol and weakening only.

inline constexpr double kFig2Ratios[] = {0.04, 0.5, 1.0};
inline constexpr const char* kFig2Panels[] = {"fig2a", "fig2b", "fig2c"};

inline ReductionScenario fig2_scenario(double ratio, const GridPolicy& policy = {},
                                       const SolveOptions& solve = {}) {
  const auto initial = family_member(1e4 * pi * pi, 0.03, 1.0, TrapShape::bathtub);
  ReductionScenario s{initial, family_member(1e2 * pi * pi, 0.03, ratio, TrapShape::bathtub),
                      GroundOccupation{100}};
  s.grid_policy = policy;
  s.solve = solve;
  return s;
}

inline std::vector<ScenarioResult> fig2(const GridPolicy& policy = {}, const SolveOptions& solve = {},
                                        unsigned threads = 1) {
  std::vector<ScenarioResult> out(std::size(kFig2Ratios));
  parallel_for(out.size(), threads,
               [&](std::size_t i) { out[i] = run_scenario(fig2_scenario(kFig2Ratios[i], policy, solve)); });
  return out;
}

// Capacity against wall smoothness at fixed depth.

inline constexpr double kFig3Depth = 100.0 * pi * pi;
inline constexpr double kFig3Smoothness[] = {0.0, 0.05, 0.2, 0.5};

inline std::vector<SmoothnessRow> fig3(const GridPolicy& policy = {}, const SolveOptions& solve = {},
                                       unsigned threads = 1) {
  return capacity_vs_smoothness(kFig3Depth, 1.0, kFig3Smoothness, policy, solve, threads);
}

// Width-ratio sweeps for several trap families.

struct Fig4Family {
  std::string label;
  TrapShape shape;
  double relative_smoothness;
  double initial_u;
  double final_u;
};

inline std::vector<Fig4Family> fig4_families() {
  const double ui = 1e4 * pi * pi, uf = 1e2 * pi * pi;
  return {{"bathtub_0.01", TrapShape::bathtub, 0.01, ui, uf},
          {"bathtub_0.03", TrapShape::bathtub, 0.03, ui, uf},
          {"bathtub_0.1", TrapShape::bathtub, 0.1, ui, uf},
          {"gaussian", TrapShape::inverted_gaussian, 0.0, 28.0 * 28.0 * pi * pi, 64.0 * pi * pi}};
}

/// 0.1, 0.15, ..., 1.0
inline std::vector<double> fig4_ratios() {
  std::vector<double> r;
  for (int k = 2; k <= 20; ++k) r.push_back(k / 20.0);
  return r;
}

/// Flat traps carry N_i = 100 atoms; the Gaussian trap is filled to capacity.
inline ReductionScenario fig4_scenario(const Fig4Family& f, const GridPolicy& policy = {},
                                       const SolveOptions& solve = {}) {
  const auto initial = family_member(f.initial_u, f.relative_smoothness, 1.0, f.shape);
  ReductionScenario s{initial, family_member(f.final_u, f.relative_smoothness, 0.5, f.shape),
                      f.shape == TrapShape::inverted_gaussian ? filled(initial, policy, solve)
                                                              : GroundOccupation{100}};
  s.grid_policy = policy;
  s.solve = solve;
  return s;
}

inline std::vector<SweepResult> fig4(const GridPolicy& policy = {}, const SolveOptions& solve = {},
                                     unsigned threads = 1) {
  std::vector<SweepResult> out;
  const auto ratios = fig4_ratios();
  for (const auto& f : fig4_families())
    out.push_back(sweep_width_ratio(fig4_scenario(f, policy, solve), ratios, threads));
  return out;
}

/// Longest run of consecutive rows with variance below `limit`, as [lo, hi]
/// in the swept parameter; {0, 0} when no row qualifies.
inline std::pair<double, double> low_variance_window(const SweepResult& sweep, double limit) {
  std::pair<double, double> best{0.0, 0.0};
  double best_len = -1.0;
  std::size_t i = 0;
  while (i < sweep.rows.size()) {
    if (!(sweep.rows[i].variance < limit)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < sweep.rows.size() && sweep.rows[j + 1].variance < limit) ++j;
    const double len = sweep.rows[j].parameter - sweep.rows[i].parameter;
    if (len > best_len) {
      best_len = len;
      best = {sweep.rows[i].parameter, sweep.rows[j].parameter};
    }
    i = j + 1;
  }
  return best;
}

// Temperature dependence of the plateau, square traps, N_i = 80.

inline constexpr double kFig5Particles = 80.0;
inline constexpr double kFig5MuOverKT[] = {50.0, 20.0, 10.0, 7.0, 5.0, 4.0, 3.0};

/// 0.2, 0.25, ..., 1.0
inline std::vector<double> fig5_ratios() {
  std::vector<double> r;
  for (int k = 4; k <= 20; ++k) r.push_back(k / 20.0);
  return r;
}

inline ReductionScenario fig5_scenario(double initial_c, const GridPolicy& policy = {},
                                       const SolveOptions& solve = {}) {
  ReductionScenario s{family_member(initial_c * initial_c * pi * pi, 0.0, 1.0, TrapShape::square_well),
                      family_member(1e2 * pi * pi, 0.0, 0.5, TrapShape::square_well),
                      MuRatioOccupation{5.0, kFig5Particles}};
  s.grid_policy = policy;
  s.solve = solve;
  return s;
}

struct Fig5Result {
  TemperatureSweep standard;        // U_i = (100 pi)^2, temperature set by mu/kT
  std::vector<SweepResult> deeper;  // U_i = (130 pi)^2 at the same temperatures
};

inline Fig5Result fig5(std::span<const double> mu_over_kT, const GridPolicy& policy = {},
                       const SolveOptions& solve = {}, unsigned threads = 1) {
  const auto ratios = fig5_ratios();
  Fig5Result out;
  out.standard = temperature_sweep(fig5_scenario(100.0, policy, solve), mu_over_kT, ratios, threads);
  for (const auto& row : out.standard.rows) {
    auto s = fig5_scenario(130.0, policy, solve);
    s.occupation = ThermalOccupation{row.temperature, kFig5Particles};
    out.deeper.push_back(sweep_width_ratio(s, ratios, threads));
  }
  return out;
}

inline Fig5Result fig5(const GridPolicy& policy = {}, const SolveOptions& solve = {},
                       unsigned threads = 1) {
  return fig5(kFig5MuOverKT, policy, solve, threads);
}

}  // namespace fockprep::figures

#pragma once

// Sudden trap-reduction scenarios and the parameter sweeps built on them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "fockprep/counting.hpp"
#include "fockprep/errors.hpp"
#include "fockprep/occupation.hpp"
#include "fockprep/spectral_solver.hpp"
#include "fockprep/trap_models.hpp"

namespace fockprep {

struct GroundOccupation {
  std::size_t particles = 1;
  bool operator==(const GroundOccupation&) const = default;
};
/// Fermi-Dirac filling at k_B T = temperature (energy units, hbar^2/2m = 1).
struct ThermalOccupation {
  double temperature = 0.0;
  double particles = 0.0;
  bool operator==(const ThermalOccupation&) const = default;
};
/// Fermi-Dirac filling whose temperature is fixed by mu / k_B T, with mu measured
/// from the floor of the initial trap.
struct MuRatioOccupation {
  double mu_over_kT = 0.0;
  double particles = 0.0;
  bool operator==(const MuRatioOccupation&) const = default;
};
using OccupationSpec = std::variant<GroundOccupation, ThermalOccupation, MuRatioOccupation>;

struct ReductionScenario {
  TrapSpec initial;
  TrapSpec final;
  OccupationSpec occupation;
  GridPolicy grid_policy{};
  SolveOptions solve{};
  double fock_epsilon = 1e-3;
};

struct ScenarioResult {
  CountingStatistics statistics;
  FockCondition fock;
  std::size_t initial_capacity = 0;
  std::size_t final_capacity = 0;
  OccupationState occupation;
  Grid grid{-1.0, 1.0, 3};
  /// max_n |p_det(n) - p_convolution(n)| between the two inversion routes.
  double cross_check_error = 0.0;
  std::vector<std::string> warnings;

  double full_trap_probability() const { return statistics.probabilities.back(); }
};

/// Runs fn(0..count-1) on up to `threads` workers. Results must be written to
/// per-index slots; the first failure in index order is rethrown.
inline void parallel_for(std::size_t count, unsigned threads,
                         const std::function<void(std::size_t)>& fn) {
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      fn(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < count; i += workers) guarded(i);
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

inline std::optional<std::size_t> relevant_initial_levels(const OccupationSpec& occ) {
  if (const auto* g = std::get_if<GroundOccupation>(&occ)) return g->particles;
  return std::nullopt;
}

inline OccupationState build_occupation(const OccupationSpec& spec, const BoundSpectrum& initial,
                                        std::vector<std::string>& warnings) {
  OccupationState occ = std::visit(
      [&](const auto& o) -> OccupationState {
        using T = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<T, GroundOccupation>) {
          return ground_state_occupation(o.particles, initial);
        } else if constexpr (std::is_same_v<T, ThermalOccupation>) {
          return thermal_occupation(initial, o.temperature, o.particles);
        } else {
          const double t = temperature_for_mu_ratio(initial.energies, initial.potential_floor,
                                                    o.mu_over_kT, o.particles);
          return thermal_occupation(initial, t, o.particles);
        }
      },
      spec);
  if (occ.is_thermal() && !occ.weights.empty() && occ.weights.back() > 1e-3)
    warnings.push_back("highest initial bound level has occupation " +
                       std::to_string(occ.weights.back()) +
                       " > 1e-3; neglecting continuum occupation is questionable");
  return occ;
}

inline ScenarioResult count_after_reduction(const BoundSpectrum& initial, const TrapSpec& final_trap,
                                            const OccupationState& occ, const Grid& grid,
                                            const ReductionScenario& scenario) {
  ScenarioResult r;
  r.grid = grid;
  const auto final = solve_bound_states(final_trap, grid, scenario.solve);
  r.initial_capacity = initial.capacity();
  r.final_capacity = final.capacity();
  if (r.final_capacity > r.initial_capacity)
    r.warnings.push_back("final capacity " + std::to_string(r.final_capacity) +
                         " exceeds initial capacity " + std::to_string(r.initial_capacity));
  if (!final.near_threshold.empty())
    r.warnings.push_back(std::to_string(final.near_threshold.size()) +
                         " final level(s) within the threshold band were excluded");

  const auto kernel = kernel_matrix(overlap_matrix(initial, final), occ);
  r.warnings.insert(r.warnings.end(), kernel.warnings().begin(), kernel.warnings().end());
  r.statistics = poisson_binomial_statistics(kernel);
  const auto check = number_distribution(kernel);
  for (std::size_t n = 0; n < check.probabilities.size(); ++n)
    r.cross_check_error = std::max(
        r.cross_check_error, std::abs(check.probabilities[n] - r.statistics.probabilities[n]));
  if (r.cross_check_error > 1e-8)
    r.warnings.push_back("determinant and convolution distributions differ by " +
                         std::to_string(r.cross_check_error));
  r.fock = fock_condition(kernel, scenario.fock_epsilon);
  r.occupation = occ;
  return r;
}

template <class F>
auto with_context(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericalError& e) {
    throw NumericalError(context + ": " + e.what());
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(context + ": " + e.what());
  }
}

}  // namespace detail

/// Common grid for an initial trap and any number of final traps.
inline Grid scenario_grid(const TrapSpec& initial, const OccupationSpec& occupation,
                          std::span<const TrapSpec> finals, const GridPolicy& policy,
                          const SolveOptions& solve) {
  std::vector<GridRequirement> reqs;
  reqs.push_back({initial, detail::relevant_initial_levels(occupation)});
  for (const auto& f : finals) reqs.push_back({f, std::nullopt});
  return automatic_grid(reqs, policy, solve);
}

inline ScenarioResult run_scenario(const ReductionScenario& s) {
  return detail::with_context("scenario", [&] {
    const Grid grid = scenario_grid(s.initial, s.occupation, std::span(&s.final, 1), s.grid_policy,
                                    s.solve);
    const auto initial = solve_bound_states(s.initial, grid, s.solve);
    std::vector<std::string> warnings;
    const auto occ = detail::build_occupation(s.occupation, initial, warnings);
    auto r = detail::count_after_reduction(initial, s.final, occ, grid, s);
    r.warnings.insert(r.warnings.begin(), warnings.begin(), warnings.end());
    return r;
  });
}

struct SweepRow {
  double parameter = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double min_eigenvalue = 0.0;
  double full_trap_probability = 0.0;  // p(C_f)
  std::size_t final_capacity = 0;
  bool fock_satisfied = false;
};

struct SweepResult {
  std::string parameter;
  ReductionScenario base;
  Grid grid{-1.0, 1.0, 3};
  std::size_t initial_capacity = 0;
  OccupationState occupation;
  std::vector<SweepRow> rows;
  std::vector<std::string> warnings;
};

/// Final trap of the same family as `base.final` (same U and relative
/// smoothness) with half-width ratio * L_i.
inline TrapSpec final_trap_at_ratio(const ReductionScenario& base, double ratio) {
  return family_member(dimensionless_depth(base.final), base.final.relative_smoothness(),
                       ratio * base.initial.half_width(), base.final.shape());
}

inline SweepResult sweep_width_ratio(const ReductionScenario& base, std::span<const double> ratios,
                                     unsigned threads = 1) {
  for (double r : ratios)
    if (!(r > 0.0 && r <= 1.0)) throw InvalidParameter("width ratios must lie in (0, 1]");

  std::vector<TrapSpec> finals;
  finals.reserve(ratios.size());
  for (double r : ratios) finals.push_back(final_trap_at_ratio(base, r));

  SweepResult out{.parameter = "width_ratio",
                  .base = base,
                  .grid = scenario_grid(base.initial, base.occupation, finals, base.grid_policy,
                                        base.solve),
                  .initial_capacity = 0,
                  .occupation = {},
                  .rows = {},
                  .warnings = {}};
  const auto initial = detail::with_context(
      "sweep initial trap", [&] { return solve_bound_states(base.initial, out.grid, base.solve); });
  out.initial_capacity = initial.capacity();
  out.occupation = detail::build_occupation(base.occupation, initial, out.warnings);

  std::vector<ScenarioResult> results(ratios.size());
  parallel_for(ratios.size(), threads, [&](std::size_t i) {
    results[i] = detail::with_context("width ratio " + std::to_string(ratios[i]), [&] {
      return detail::count_after_reduction(initial, finals[i], out.occupation, out.grid, base);
    });
  });

  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const auto& r = results[i];
    out.rows.push_back({ratios[i], r.statistics.mean, r.statistics.variance, r.fock.min_eigenvalue,
                        r.full_trap_probability(), r.final_capacity, r.fock.satisfied});
    for (const auto& w : r.warnings)
      out.warnings.push_back("ratio " + std::to_string(ratios[i]) + ": " + w);
  }
  return out;
}

/// Largest mean over a sweep, the scalar used to compare temperatures.
inline const SweepRow& plateau_row(const SweepResult& sweep) {
  if (sweep.rows.empty()) throw InvalidParameter("empty sweep");
  return *std::max_element(sweep.rows.begin(), sweep.rows.end(),
                           [](const SweepRow& a, const SweepRow& b) { return a.mean < b.mean; });
}

struct SmoothnessRow {
  double smoothness = 0.0;
  std::size_t capacity = 0;
  double top_gap = 0.0;  // E_C - E_{C-1}; zero when fewer than two levels
  std::vector<double> energies;
};

inline std::vector<SmoothnessRow> capacity_vs_smoothness(double depth, double half_width,
                                                         std::span<const double> smoothness,
                                                         const GridPolicy& policy = {},
                                                         const SolveOptions& solve = {},
                                                         unsigned threads = 1) {
  if (!(depth > 0.0) || !(half_width > 0.0))
    throw InvalidParameter("depth and half-width must be positive");
  std::vector<SmoothnessRow> rows(smoothness.size());
  parallel_for(smoothness.size(), threads, [&](std::size_t i) {
    const auto trap = TrapSpec::bathtub(depth, half_width, smoothness[i]);
    const auto grid = automatic_grid(trap, policy, solve);
    const auto h = discretize(trap, grid);
    SmoothnessRow row;
    row.smoothness = smoothness[i];
    row.capacity = count_eigenvalues_below(h.matrix, -solve.threshold_fraction * depth);
    const auto [lo, hi] = h.matrix.gershgorin_bounds();
    double lower = lo;
    for (std::size_t k = 0; k < row.capacity; ++k) {
      row.energies.push_back(bisect_eigenvalue(h.matrix, k, lower, 0.0));
      lower = row.energies.back();
    }
    if (row.capacity >= 2)
      row.top_gap = row.energies[row.capacity - 1] - row.energies[row.capacity - 2];
    rows[i] = std::move(row);
  });
  return rows;
}

struct TemperatureRow {
  double mu_over_kT = 0.0;
  double temperature = 0.0;
  double chemical_potential = 0.0;
  double plateau_mean = 0.0;
  double plateau_ratio = 0.0;
  double top_level_weight = 0.0;
};

struct TemperatureSweep {
  std::vector<TemperatureRow> rows;
  std::vector<SweepResult> sweeps;  // one width-ratio sweep per temperature
};

/// One width-ratio sweep per mu/kT; the base must carry a thermal occupation
/// (its particle number is used, its temperature is replaced).
inline TemperatureSweep temperature_sweep(const ReductionScenario& base,
                                          std::span<const double> mu_over_kT,
                                          std::span<const double> ratios, unsigned threads = 1) {
  double particles = 0.0;
  if (const auto* t = std::get_if<ThermalOccupation>(&base.occupation))
    particles = t->particles;
  else if (const auto* m = std::get_if<MuRatioOccupation>(&base.occupation))
    particles = m->particles;
  else
    throw InvalidParameter("temperature_sweep needs a thermal occupation");

  TemperatureSweep out;
  for (double ratio : mu_over_kT) {
    ReductionScenario s = base;
    s.occupation = MuRatioOccupation{ratio, particles};
    auto sweep = sweep_width_ratio(s, ratios, threads);
    const auto& best = plateau_row(sweep);
    out.rows.push_back({ratio, sweep.occupation.temperature,
                        sweep.occupation.chemical_potential.value_or(0.0), best.mean,
                        best.parameter, sweep.occupation.weights.back()});
    out.sweeps.push_back(std::move(sweep));
  }
  return out;
}

/// Final trap at half the initial width, depth solved exactly from U_f.
inline TrapSpec recipe(double initial_u, double final_u, const TrapSpec& initial) {
  if (!(final_u < initial_u)) throw InvalidParameter("recipe needs U_f < U_i");
  const double actual = dimensionless_depth(initial);
  if (std::abs(actual - initial_u) > 1e-9 * initial_u)
    throw InvalidParameter("initial trap has U = " + std::to_string(actual) + ", not U_i = " +
                           std::to_string(initial_u));
  return family_member(final_u, initial.relative_smoothness(), 0.5 * initial.half_width(),
                       initial.shape());
}

}  // namespace fockprep

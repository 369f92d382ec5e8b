#pragma once

// Bound states of a 1D trap: central-difference Hamiltonian on a uniform grid
// with Dirichlet ends, diagonalized for the negative-energy part only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fockprep/errors.hpp"
#include "fockprep/trap_models.hpp"
#include "fockprep/tridiagonal.hpp"

namespace fockprep {

struct TridiagonalHamiltonian {
  SymmetricTridiagonal matrix;  // d_j = 2/dx^2 + V(x_j), e_j = -1/dx^2
  Grid grid;
  std::vector<double> potential;
};

inline TridiagonalHamiltonian discretize(const TrapSpec& spec, const Grid& grid) {
  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  if (n < 3) throw InvalidParameter("grid needs at least 3 points");
  if (!(dx > 0.0)) throw InvalidParameter("grid spacing must be positive");

  const double kinetic = 1.0 / (dx * dx);
  TridiagonalHamiltonian h{{std::vector<double>(n), std::vector<double>(n - 1, -kinetic)},
                           grid,
                           std::vector<double>(n)};
  for (std::size_t j = 0; j < n; ++j) {
    h.potential[j] = evaluate_potential(spec, grid[j]);
    h.matrix.diagonal[j] = 2.0 * kinetic + h.potential[j];
  }
  return h;
}

enum class Parity { even, odd, none };

inline std::string_view to_string(Parity p) noexcept {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::none: return "none";
  }
  return "none";
}

/// Bound energies (ascending, all below -threshold) and Delta x-orthonormal
/// eigenfunctions sampled on `grid`. Levels are 0-based here; the n-th level
/// of the physics notation is index n-1.
struct BoundSpectrum {
  std::vector<double> energies;
  std::vector<double> eigenfunctions;  // row-major, capacity() x grid.size()
  Grid grid;
  double potential_floor = 0.0;  // min_j V(x_j)
  double threshold = 0.0;        // states count as bound iff E < -threshold
  std::vector<double> near_threshold;  // energies in [-threshold, 0), excluded

  std::size_t capacity() const noexcept { return energies.size(); }

  std::span<const double> eigenfunction(std::size_t level) const {
    return {eigenfunctions.data() + level * grid.size(), grid.size()};
  }
};

/// Signed overlap of level with its mirror image; +1 even, -1 odd.
inline double reflection_overlap(const BoundSpectrum& s, std::size_t level) {
  const auto phi = s.eigenfunction(level);
  const std::size_t n = phi.size();
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += phi[j] * phi[n - 1 - j];
  return acc * s.grid.spacing();
}

inline Parity parity(const BoundSpectrum& s, std::size_t level) {
  if (!s.grid.is_symmetric()) return Parity::none;
  const double r = reflection_overlap(s, level);
  if (r > 0.5) return Parity::even;
  if (r < -0.5) return Parity::odd;
  return Parity::none;
}

struct SolveOptions {
  /// Bound-state threshold as a fraction of the trap depth.
  double threshold_fraction = 1e-6;
  /// Components below this fraction of max|phi| are ignored when fixing the sign.
  double sign_cutoff = 1e-6;
  EigenpairOptions eigen;
};

namespace detail {

inline double trap_depth(const TridiagonalHamiltonian& h) {
  double floor = 0.0;
  for (double v : h.potential) floor = std::min(floor, v);
  return -floor;
}

/// v^T H v for unit v, with the kinetic part as a sum of squared differences
/// so that shallow energies do not lose digits to cancellation against 2/dx^2.
inline double rayleigh_quotient(const TridiagonalHamiltonian& h, std::span<const double> v) {
  const std::size_t n = v.size();
  const double dx = h.grid.spacing();
  double kinetic = v[0] * v[0] + v[n - 1] * v[n - 1];
  double potential = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const double d = v[j + 1] - v[j];
    kinetic += d * d;
  }
  for (std::size_t j = 0; j < n; ++j) potential += h.potential[j] * v[j] * v[j];
  double norm = 0.0;
  for (double x : v) norm += x * x;
  return (kinetic / (dx * dx) + potential) / norm;
}

}  // namespace detail

inline BoundSpectrum solve_bound_states(const TridiagonalHamiltonian& h,
                                        const SolveOptions& options = {}) {
  const auto& t = h.matrix;
  const std::size_t n = t.size();
  const double depth = detail::trap_depth(h);
  const double eps = options.threshold_fraction * depth;

  BoundSpectrum out{{}, {}, h.grid, -depth, eps, {}};
  const std::size_t bound = depth > 0.0 ? count_eigenvalues_below(t, -eps) : 0;
  const std::size_t below_zero = depth > 0.0 ? count_eigenvalues_below(t, 0.0) : 0;

  if (below_zero > bound) {
    const double lower = -eps - 1.0;
    for (std::size_t k = bound; k < below_zero; ++k)
      out.near_threshold.push_back(bisect_eigenvalue(t, k, lower, 0.0));
  }
  if (bound == 0) return out;

  auto pairs = lowest_eigenpairs(t, bound, options.eigen);
  const double scale = 1.0 / std::sqrt(h.grid.spacing());
  out.energies.resize(bound);
  for (std::size_t k = 0; k < bound; ++k) {
    std::span<double> v(pairs.vectors.data() + k * n, n);
    double peak = 0.0;
    for (double x : v) peak = std::max(peak, std::abs(x));
    const auto first = std::find_if(v.begin(), v.end(), [&](double x) {
      return std::abs(x) > options.sign_cutoff * peak;
    });
    const double sign = (first != v.end() && *first < 0.0) ? -1.0 : 1.0;
    out.energies[k] = detail::rayleigh_quotient(h, v);
    for (double& x : v) x *= sign * scale;
  }
  out.eigenfunctions = std::move(pairs.vectors);

  for (std::size_t k = 1; k < bound; ++k)
    if (!(out.energies[k] > out.energies[k - 1]))
      throw NumericalError("bound energies not strictly increasing at level " + std::to_string(k) +
                           "; grid too coarse to separate levels");
  return out;
}

inline BoundSpectrum solve_bound_states(const TrapSpec& spec, const Grid& grid,
                                        const SolveOptions& options = {}) {
  return solve_bound_states(discretize(spec, grid), options);
}

/// Number of bound states (E < -threshold); eigenvalue counting only.
inline std::size_t capacity(const TrapSpec& spec, const Grid& grid,
                            const SolveOptions& options = {}) {
  const auto h = discretize(spec, grid);
  const double depth = detail::trap_depth(h);
  if (depth <= 0.0) return 0;
  return count_eigenvalues_below(h.matrix, -options.threshold_fraction * depth);
}

// ---------------------------------------------------------------------------
// Automatic grids.

struct GridPolicy {
  double points_per_wavelength = 32.0;  // per 2 pi / sqrt(V)
  double points_per_smoothness = 16.0;  // per sigma
  double points_per_half_width = 200.0;
  double margin_decay_lengths = 12.0;   // evanescent margin in units of 1/sqrt|E|
  double max_margin_half_widths = 20.0;
  std::optional<std::size_t> n_points;  // fixed point count, overrides the spacing rules

  /// Same rules at half the spacing.
  GridPolicy refined() const {
    GridPolicy p = *this;
    p.points_per_wavelength *= 2.0;
    p.points_per_smoothness *= 2.0;
    p.points_per_half_width *= 2.0;
    if (p.n_points) p.n_points = 2 * *p.n_points - 1;
    return p;
  }
};

/// A trap to be accommodated by a grid, with the number of its lowest levels
/// that must be free of box truncation (all bound levels when unset).
struct GridRequirement {
  TrapSpec trap;
  std::optional<std::size_t> relevant_levels;
};

namespace detail {

inline double target_spacing(const TrapSpec& trap, const GridPolicy& policy) {
  double dx = trap.half_width() / policy.points_per_half_width;
  if (trap.shape() == TrapShape::bathtub)
    dx = std::min(dx, trap.smoothness() / policy.points_per_smoothness);
  if (trap.depth() > 0.0) {
    const double shortest_wavelength = 2.0 * std::numbers::pi / std::sqrt(trap.depth());
    dx = std::min(dx, shortest_wavelength / policy.points_per_wavelength);
  }
  return dx;
}

/// Half-extent of the region where the potential itself matters.
inline double support(const TrapSpec& trap, std::optional<double> shallow_energy) {
  switch (trap.shape()) {
    case TrapShape::bathtub: return trap.half_width() + 5.0 * trap.smoothness();
    case TrapShape::square_well: return trap.half_width();
    case TrapShape::inverted_gaussian: {
      double turning = 3.0 * trap.half_width();
      if (shallow_energy && -*shallow_energy < trap.depth())
        turning = std::max(turning, trap.half_width() *
                                        std::sqrt(2.0 * std::log(trap.depth() / -*shallow_energy)));
      return turning;
    }
  }
  return trap.half_width();
}

}  // namespace detail

/// Smallest symmetric grid meeting the resolution and evanescent-margin rules
/// for every requirement. Spacing divides the first trap's half-width exactly,
/// so its wall falls on a node.
inline Grid automatic_grid(std::span<const GridRequirement> traps, const GridPolicy& policy = {},
                           const SolveOptions& options = {}) {
  if (traps.empty()) throw InvalidParameter("automatic_grid needs at least one trap");
  double dx_target = detail::target_spacing(traps[0].trap, policy);
  for (const auto& r : traps) dx_target = std::min(dx_target, detail::target_spacing(r.trap, policy));
  const double anchor = traps[0].trap.half_width();
  const double dx = anchor / std::ceil(anchor / dx_target - 1e-9);

  auto half_extent_for = [&](const Grid& box) {
    double extent = 0.0;
    for (const auto& r : traps) {
      const double cap = policy.max_margin_half_widths * r.trap.half_width();
      std::optional<double> shallow;
      double margin = std::min(2.0 * r.trap.half_width(), cap);
      if (r.trap.depth() > 0.0) {
        const auto h = discretize(r.trap, box);
        const std::size_t bound =
            count_eigenvalues_below(h.matrix, -options.threshold_fraction * r.trap.depth());
        const std::size_t relevant = std::min(bound, r.relevant_levels.value_or(bound));
        if (relevant > 0) {
          const auto [lo, hi] = h.matrix.gershgorin_bounds();
          shallow = bisect_eigenvalue(h.matrix, relevant - 1, lo, 0.0);
          margin = std::min(policy.margin_decay_lengths / std::sqrt(-*shallow), cap);
        } else {
          // Confinement can push a weakly bound level above threshold; widen.
          margin = std::min(std::max(margin, 2.0 * box[box.size() - 1]), cap);
        }
      }
      extent = std::max(extent, detail::support(r.trap, shallow) + margin);
    }
    return extent;
  };

  // Shallow levels bind more strongly as the box grows, so the required
  // extent is recomputed on the candidate box until it settles.
  double extent = 0.0;
  for (const auto& r : traps)
    extent = std::max(extent, detail::support(r.trap, std::nullopt) + r.trap.half_width());
  for (int iter = 0; iter < 16; ++iter) {
    const double next = half_extent_for(Grid::symmetric(dx, extent));
    const bool settled = std::abs(next - extent) <= 0.02 * extent;
    extent = next;
    if (settled) break;
  }

  if (policy.n_points) {
    const std::size_t n = *policy.n_points;
    if (n < 3) throw InvalidParameter("grid needs at least 3 points");
    return Grid(-extent, extent, n);
  }
  return Grid::symmetric(dx, extent);
}

inline Grid automatic_grid(const TrapSpec& trap, const GridPolicy& policy = {},
                           const SolveOptions& options = {}) {
  const GridRequirement r{trap, std::nullopt};
  return automatic_grid(std::span<const GridRequirement>(&r, 1), policy, options);
}

/// Diagnostic: does the highest bound level move by more than `relative_tolerance`
/// when the spacing is halved?
struct ResolutionReport {
  std::size_t capacity = 0;
  std::size_t refined_capacity = 0;
  double highest_energy = 0.0;
  double refined_highest_energy = 0.0;
  double relative_change = 0.0;
  bool under_resolved = false;
};

inline ResolutionReport check_resolution(const TrapSpec& spec, const Grid& grid,
                                         double relative_tolerance,
                                         const SolveOptions& options = {}) {
  ResolutionReport report;
  auto highest = [&](const Grid& g, std::size_t& count) {
    const auto h = discretize(spec, g);
    const double depth = detail::trap_depth(h);
    count = depth > 0.0 ? count_eigenvalues_below(h.matrix, -options.threshold_fraction * depth) : 0;
    if (count == 0) return 0.0;
    const auto [lo, hi] = h.matrix.gershgorin_bounds();
    return bisect_eigenvalue(h.matrix, count - 1, lo, 0.0);
  };
  report.highest_energy = highest(grid, report.capacity);
  report.refined_highest_energy = highest(grid.refined(), report.refined_capacity);
  if (report.capacity != report.refined_capacity) {
    report.relative_change = 1.0;
    report.under_resolved = true;
    return report;
  }
  if (report.capacity == 0) return report;
  report.relative_change = std::abs(report.refined_highest_energy - report.highest_energy) /
                           std::abs(report.refined_highest_energy);
  report.under_resolved = report.relative_change > relative_tolerance;
  return report;
}

}  // namespace fockprep

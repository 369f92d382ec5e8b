#pragma once

// Initial-state level occupations: zero-temperature filling or Fermi-Dirac
// weights with the chemical potential fixed by the particle number.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fockprep/errors.hpp"
#include "fockprep/spectral_solver.hpp"

namespace fockprep {

/// Occupation probabilities of the initial bound levels (index 0 = ground level).
/// `temperature` stores k_B T in energy units; zero means the step filling.
struct OccupationState {
  std::vector<double> weights;
  double particle_number = 0.0;
  double temperature = 0.0;
  std::optional<double> chemical_potential;

  bool is_thermal() const noexcept { return temperature > 0.0; }
};

/// The lowest `particles` levels filled, the rest empty.
inline OccupationState ground_state_occupation(std::size_t particles, std::size_t levels) {
  if (particles < 1) throw InvalidParameter("N_i must be at least 1");
  if (particles > levels)
    throw InvalidParameter("N_i = " + std::to_string(particles) + " exceeds the trap capacity " +
                           std::to_string(levels));
  OccupationState occ;
  occ.weights.assign(levels, 0.0);
  std::fill_n(occ.weights.begin(), particles, 1.0);
  occ.particle_number = static_cast<double>(particles);
  return occ;
}

inline OccupationState ground_state_occupation(std::size_t particles, const BoundSpectrum& spectrum) {
  return ground_state_occupation(particles, spectrum.capacity());
}

/// 1 / (exp(x) + 1) without overflow for large |x|.
inline double fermi_function(double x) noexcept {
  if (x > 0.0) {
    const double e = std::exp(-x);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

inline double thermal_particle_number(std::span<const double> energies, double temperature,
                                      double chemical_potential) noexcept {
  double total = 0.0;
  for (double e : energies) total += fermi_function((e - chemical_potential) / temperature);
  return total;
}

struct ChemicalPotentialOptions {
  double bracket_temperatures = 50.0;  // bracket [E_1 - 50 kT, 0 + 50 kT]
  double number_tolerance = 1e-12;
  int max_iterations = 400;
};

/// mu such that sum_n f((E_n - mu)/kT) = N. The sum is strictly increasing in mu,
/// so bisection on the fixed bracket converges to the unique root.
inline double solve_chemical_potential(std::span<const double> energies, double temperature,
                                       double particles, const ChemicalPotentialOptions& options = {}) {
  if (!(temperature > 0.0)) throw InvalidParameter("temperature must be > 0");
  if (energies.empty()) throw InvalidParameter("thermal occupation needs at least one bound level");
  if (!(particles > 0.0)) throw InvalidParameter("N_i must be > 0");
  const auto capacity = static_cast<double>(energies.size());
  if (!(particles < capacity))
    throw NumericalError("chemical potential not bracketable: N_i = " + std::to_string(particles) +
                         " must be below the capacity " + std::to_string(energies.size()) +
                         " at nonzero temperature");

  double lo = energies.front() - options.bracket_temperatures * temperature;
  double hi = options.bracket_temperatures * temperature;
  if (thermal_particle_number(energies, temperature, lo) > particles ||
      thermal_particle_number(energies, temperature, hi) < particles)
    throw NumericalError("chemical potential not bracketable for N_i = " + std::to_string(particles));

  // N(mu) - N split into an integer part and small hole/particle tails, so the
  // sign stays meaningful when mu sits in a gap much wider than kT.
  auto mismatch = [&](double mu) {
    double below = 0.0, tails = 0.0;
    for (double e : energies) {
      const double x = (e - mu) / temperature;
      if (x < 0.0) {
        below += 1.0;
        tails -= fermi_function(-x);
      } else {
        tails += fermi_function(x);
      }
    }
    return (below - particles) + tails;
  };
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double m = mismatch(mid);
    if (m == 0.0) break;
    (m > 0.0 ? hi : lo) = mid;
  }
  if (std::abs(thermal_particle_number(energies, temperature, mid) - particles) >
      options.number_tolerance * std::max(1.0, particles))
    throw NumericalError("chemical potential did not converge for N_i = " + std::to_string(particles));
  return mid;
}

inline OccupationState thermal_occupation(std::span<const double> energies, double temperature,
                                          double particles,
                                          const ChemicalPotentialOptions& options = {}) {
  const double mu = solve_chemical_potential(energies, temperature, particles, options);
  OccupationState occ;
  occ.weights.reserve(energies.size());
  for (double e : energies) occ.weights.push_back(fermi_function((e - mu) / temperature));
  occ.particle_number = particles;
  occ.temperature = temperature;
  occ.chemical_potential = mu;
  return occ;
}

inline OccupationState thermal_occupation(const BoundSpectrum& spectrum, double temperature,
                                          double particles,
                                          const ChemicalPotentialOptions& options = {}) {
  return thermal_occupation(spectrum.energies, temperature, particles, options);
}

/// k_B T for which the self-consistent chemical potential, measured from
/// `energy_origin` (usually the potential floor), equals mu_over_kT * k_B T.
/// At fixed ratio the particle number grows monotonically with T.
inline double temperature_for_mu_ratio(std::span<const double> energies, double energy_origin,
                                       double mu_over_kT, double particles) {
  if (energies.empty()) throw InvalidParameter("no bound levels");
  if (!(particles > 0.0) || !(particles < static_cast<double>(energies.size())))
    throw InvalidParameter("N_i must lie strictly between 0 and the capacity");
  auto count_at = [&](double t) {
    return thermal_particle_number(energies, t, energy_origin + mu_over_kT * t);
  };
  const double span = std::max(energies.back() - energy_origin, 1e-300);
  double lo = span * 1e-8;
  double hi = span;
  for (int i = 0; i < 200 && count_at(hi) < particles; ++i) hi *= 2.0;
  for (int i = 0; i < 200 && count_at(lo) > particles; ++i) lo *= 0.5;
  if (count_at(hi) < particles || count_at(lo) > particles)
    throw NumericalError("no temperature reproduces N_i = " + std::to_string(particles) +
                         " at mu/kT = " + std::to_string(mu_over_kT));
  for (int iter = 0; iter < 300; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (count_at(mid) > particles ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// rho(x_j) = sum_n pi_n |phi_n(x_j)|^2 on the spectrum grid.
inline std::vector<double> density_profile(const BoundSpectrum& spectrum, const OccupationState& occ) {
  if (occ.weights.size() != spectrum.capacity())
    throw InvalidParameter("occupation has " + std::to_string(occ.weights.size()) +
                           " weights but the spectrum has " +
                           std::to_string(spectrum.capacity()) + " levels");
  std::vector<double> rho(spectrum.grid.size(), 0.0);
  for (std::size_t n = 0; n < spectrum.capacity(); ++n) {
    const double w = occ.weights[n];
    if (w == 0.0) continue;
    const auto phi = spectrum.eigenfunction(n);
    for (std::size_t j = 0; j < rho.size(); ++j) rho[j] += w * phi[j] * phi[j];
  }
  return rho;
}

/// Tonks parameter after a density change at fixed coupling: gamma_i n_i / n_f.
inline double tonks_ratio(double gamma_initial, double density_initial, double density_final) {
  if (!(gamma_initial > 0.0) || !(density_initial > 0.0) || !(density_final > 0.0))
    throw InvalidParameter("Tonks parameter and densities must be positive");
  return gamma_initial * density_initial / density_final;
}

}  // namespace fockprep

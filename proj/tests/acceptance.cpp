// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "fockprep/counting.hpp"
#include "fockprep/experiments.hpp"
#include "fockprep/figures.hpp"
#include "oracles.hpp"

using namespace fockprep;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string num(double x, const char* fmt = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const unsigned kThreads = std::max(1u, std::thread::hardware_concurrency());

Outcome fock_state() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run_scenario(figures::fig2_scenario(0.5));
  const double t = seconds_since(t0);
  const auto& p = r.statistics.probabilities;
  o.require(r.final_capacity == 10, "C_f=" + std::to_string(r.final_capacity));
  o.require(p.size() > 10 && p[10] >= 0.999, "p(10)=" + num(p.size() > 10 ? p[10] : 0.0, "%.8f"));
  o.require(r.statistics.variance <= 1e-3, "var=" + num(r.statistics.variance));
  o.require(std::abs(r.statistics.mean - 10.0) <= 1e-3, "mean=" + num(r.statistics.mean, "%.8f"));
  o.require(t < 30.0, "t=" + num(t, "%.1f") + "s");
  return o;
}

Outcome failure_modes() {
  Outcome o;
  for (double ratio : {0.04, 1.0}) {
    const auto r = run_scenario(figures::fig2_scenario(ratio));
    const auto& p = r.statistics.probabilities;
    const auto broad = std::count_if(p.begin(), p.end(), [](double x) { return x > 0.05; });
    const std::string tag = "r=" + num(ratio) + ": ";
    o.require(r.statistics.mean < 10.0, tag + "mean=" + num(r.statistics.mean));
    o.require(r.statistics.variance > 0.1, tag + "var=" + num(r.statistics.variance));
    o.require(broad >= 3, tag + std::to_string(broad) + " outcomes with p>0.05");
  }
  return o;
}

Outcome capacity_calibration() {
  Outcome o;
  for (auto [c, expected] : {std::pair{100.0, 100}, std::pair{10.0, 10}}) {
    const auto trap = family_member(c * c * pi * pi, 0.0, 1.0, TrapShape::square_well);
    const auto cap = static_cast<int>(capacity(trap, automatic_grid(trap)));
    o.require(std::abs(cap - expected) <= 1,
              "U=" + num(c) + "^2 pi^2 -> C=" + std::to_string(cap));
  }
  return o;
}

Outcome smoothness_trend() {
  Outcome o;
  const std::vector<double> sigmas{0.05, 0.2, 0.5};
  const auto rows = capacity_vs_smoothness(figures::kFig3Depth, 1.0, sigmas, {}, {}, kThreads);
  std::string caps, gaps;
  for (const auto& r : rows) {
    caps += (caps.empty() ? "" : "/") + std::to_string(r.capacity);
    gaps += (gaps.empty() ? "" : "/") + num(r.top_gap, "%.3g");
  }
  o.require(rows[0].capacity <= rows[1].capacity && rows[1].capacity <= rows[2].capacity,
            "capacities " + caps + " non-decreasing");
  o.require(rows[2].capacity > rows[0].capacity, "C(0.5) > C(0.05)");
  o.require(rows[0].top_gap > rows[1].top_gap && rows[1].top_gap > rows[2].top_gap,
            "top gaps " + gaps + " decreasing");
  return o;
}

Outcome robustness_plateau() {
  Outcome o;
  const auto families = figures::fig4_families();
  const auto ratios = figures::fig4_ratios();
  double previous_width = -1.0;
  for (const auto& f : families) {
    const auto s = figures::fig4_scenario(f);
    const auto sweep = sweep_width_ratio(s, ratios, kThreads);
    if (f.shape == TrapShape::bathtub) {
      const auto [lo, hi] = figures::low_variance_window(sweep, 1e-2);
      const std::string tag = f.label + " window [" + num(lo) + "," + num(hi) + "]";
      o.require(lo <= 0.4 + 1e-12 && hi >= 0.6 - 1e-12, tag + " contains [0.4,0.6]");
      o.require(hi - lo >= previous_width - 1e-12, tag + " not narrower than previous");
      previous_width = hi - lo;
    } else {
      const auto& best = plateau_row(sweep);
      const auto final_at_half = figures::fig4_scenario(f).final;
      const std::size_t cf = capacity(final_at_half, automatic_grid(final_at_half));
      const std::size_t ci = sweep.initial_capacity;
      o.require(ci >= 98 && ci <= 102, "gaussian C_i=" + std::to_string(ci));
      o.require(cf >= 9 && cf <= 11, "gaussian C_f=" + std::to_string(cf));
      o.require(std::abs(best.mean - 10.0) <= 0.05,
                "gaussian plateau mean=" + num(best.mean) + " at r=" + num(best.parameter));
    }
  }
  return o;
}

Outcome temperature_trend(const figures::Fig5Result& r) {
  Outcome o;
  std::string trend;
  bool falling = true;
  for (std::size_t i = 0; i < r.standard.rows.size(); ++i) {
    const auto& row = r.standard.rows[i];
    trend += (trend.empty() ? "" : " ") + num(row.mu_over_kT) + ":" + num(row.plateau_mean, "%.4f");
    if (i > 0) falling = falling && row.plateau_mean <= r.standard.rows[i - 1].plateau_mean + 1e-9;
  }
  o.require(falling, "plateau mean vs mu/kT " + trend + " non-increasing");
  const auto& last = r.standard.rows.back();
  o.require(last.plateau_mean < 9.9, "at mu/kT=" + num(last.mu_over_kT) + " plateau " +
                                         num(last.plateau_mean, "%.4f") + " < 9.9");
  const double deeper = plateau_row(r.deeper.back()).mean;
  o.require(deeper >= 9.9, "U_i=(130pi)^2 at kT=" + num(last.temperature) + " plateau " +
                               num(deeper, "%.4f") + " >= 9.9");
  return o;
}

Outcome oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_p = 0.0, worst_sum = 0.0, worst_moment = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t c = 1 + static_cast<std::size_t>(trial % 12);
    std::vector<double> lambdas(c);
    for (double& l : lambdas) l = u(rng);
    const KernelMatrix b(oracle::random_symmetric(lambdas, rng));
    const auto det = number_distribution(b);
    const auto conv = poisson_binomial_oracle(b);
    double sum = 0.0;
    for (std::size_t n = 0; n <= c; ++n) {
      worst_p = std::max(worst_p, std::abs(det.probabilities[n] - conv[n]));
      sum += det.probabilities[n];
    }
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    const double tr = b.matrix().trace();
    const double tr2 = (b.matrix() * b.matrix()).trace();
    worst_moment = std::max({worst_moment, std::abs(det.mean - tr), std::abs(det.variance - (tr - tr2))});
  }
  o.require(worst_p <= 1e-10, "max |p_det - p_conv|=" + num(worst_p, "%.2e"));
  o.require(worst_sum <= 1e-10, "max |sum p - 1|=" + num(worst_sum, "%.2e"));
  o.require(worst_moment <= 1e-8, "max moment error=" + num(worst_moment, "%.2e"));
  return o;
}

Outcome eigensolver_oracle() {
  Outcome o;
  const auto trap = TrapSpec::square_well(2.0, 1.0);
  const auto exact = oracle::square_well_energies(2.0, 1.0);
  const Grid grid = automatic_grid(trap);
  auto errors_on = [&](const Grid& g) {
    const auto s = solve_bound_states(trap, g);
    std::vector<double> err;
    if (s.capacity() != exact.size()) return err;
    for (std::size_t k = 0; k < exact.size(); ++k) err.push_back(std::abs(s.energies[k] - exact[k]));
    return err;
  };
  const auto e0 = errors_on(grid);
  const auto e1 = errors_on(grid.refined());
  const auto e2 = errors_on(grid.refined().refined());
  o.require(!e0.empty() && e1.size() == e0.size() && e2.size() == e0.size(),
            std::to_string(exact.size()) + " bound level(s)");
  if (!o.pass) return o;
  double worst = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) worst = std::max(worst, e0[k] / std::abs(exact[k]));
  o.require(worst <= 1e-4, "max relative error " + num(worst, "%.2e") + " at dx=" + num(grid.spacing()));
  for (std::size_t k = 0; k < exact.size(); ++k) {
    const double r1 = e0[k] / e1[k], r2 = e1[k] / e2[k];
    o.require(std::abs(r1 - 4.0) <= 0.8 && std::abs(r2 - 4.0) <= 0.8,
              "level " + std::to_string(k + 1) + " error ratios " + num(r1, "%.3f") + ", " +
                  num(r2, "%.3f"));
  }
  return o;
}

Outcome isospectral() {
  Outcome o;
  for (auto shape : {TrapShape::bathtub, TrapShape::square_well, TrapShape::inverted_gaussian}) {
    const auto a = TrapSpec::make(shape, 900.0, 1.0, 0.05);
    const auto b = TrapSpec::make(shape, 3600.0, 0.5, 0.025);
    const auto sa = solve_bound_states(a, automatic_grid(a));
    const auto sb = solve_bound_states(b, automatic_grid(b));
    const std::size_t n = std::min<std::size_t>(10, std::min(sa.capacity(), sb.capacity()));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double ea = sa.energies[k] * 1.0, eb = sb.energies[k] * 0.25;
      worst = std::max(worst, std::abs(ea - eb) / std::abs(ea));
    }
    o.require(n == 10 && worst <= 1e-6, std::string(to_string(shape)) + " " + std::to_string(n) +
                                            " levels, max rel diff " + num(worst, "%.2e"));
  }
  return o;
}

Outcome thermal_normalization(const figures::Fig5Result& r) {
  Outcome o;
  double worst_sum = 0.0, worst_mu = 0.0;
  std::size_t runs = 0;
  auto check = [&](const SweepResult& s) {
    double total = 0.0;
    for (double w : s.occupation.weights) total += w;
    worst_sum = std::max(worst_sum, std::abs(total - s.occupation.particle_number));
    const auto initial = solve_bound_states(s.base.initial, s.grid, s.base.solve);
    const double mu = oracle::chemical_potential(initial.energies, s.occupation.temperature,
                                                 s.occupation.particle_number);
    worst_mu = std::max(worst_mu, std::abs(*s.occupation.chemical_potential - mu) / std::abs(mu));
    ++runs;
  };
  for (const auto& s : r.standard.sweeps) check(s);
  for (const auto& s : r.deeper) check(s);
  o.require(worst_sum <= 1e-10, std::to_string(runs) + " thermal runs, max |sum pi - N|=" +
                                    num(worst_sum, "%.2e"));
  o.require(worst_mu <= 1e-9, "max relative mu deviation " + num(worst_mu, "%.2e"));
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += o.pass ? 0 : 1;
    std::printf("[%s] %2d %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  report(1, "Fock state at L_f/L_i = 0.5", fock_state);
  report(2, "squeezing-only and weakening-only failure modes", failure_modes);
  report(3, "square-well capacity calibration", capacity_calibration);
  report(4, "smoothness adds bound states near the brim", smoothness_trend);
  report(5, "width-ratio robustness plateau", robustness_plateau);

  figures::Fig5Result thermal;
  bool thermal_ok = true;
  std::string thermal_error;
  try {
    thermal = figures::fig5(std::vector<double>{50.0, 20.0, 10.0, 7.0, 5.0}, {}, {}, kThreads);
  } catch (const std::exception& e) {
    thermal_ok = false;
    thermal_error = e.what();
  }
  auto guarded = [&](Outcome (*f)(const figures::Fig5Result&)) {
    return [&, f] {
      if (!thermal_ok) throw NumericalError(thermal_error);
      return f(thermal);
    };
  };
  report(6, "finite-temperature plateau trend", guarded(temperature_trend));
  report(7, "determinant inversion equals Poisson-binomial convolution", oracle_equivalence);
  report(8, "finite square well against transcendental roots", eigensolver_oracle);
  report(9, "isospectral (V, L) -> (4V, L/2) invariance", isospectral);
  report(10, "thermal normalization and chemical potential", guarded(thermal_normalization));

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

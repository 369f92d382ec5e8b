#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fockprep/experiments.hpp"
#include "oracles.hpp"

using namespace fockprep;
using std::numbers::pi;

namespace {

TrapSpec flat(double c, double relative_sigma, double half_width) {
  return family_member(c * c * pi * pi, relative_sigma, half_width,
                       relative_sigma > 0.0 ? TrapShape::bathtub : TrapShape::square_well);
}

ReductionScenario small_reduction(double ratio = 0.5) {
  ReductionScenario s{flat(30, 0.03, 1.0), flat(5, 0.03, ratio), GroundOccupation{30}};
  return s;
}

}  // namespace

TEST_CASE("identity reduction keeps every atom") {
  const auto trap = flat(12, 0.05, 1.0);
  const auto r = run_scenario({trap, trap, GroundOccupation{12}});
  REQUIRE(r.initial_capacity == 12);
  CHECK(r.final_capacity == 12);
  CHECK(r.full_trap_probability() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.fock.satisfied);
  CHECK(r.cross_check_error < 1e-10);
}

TEST_CASE("combined squeeze and weakening prepares a Fock state, weakening alone does not") {
  const auto good = run_scenario(small_reduction(0.5));
  CHECK(good.final_capacity == 5);
  CHECK(good.statistics.mean == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(good.statistics.variance < 1e-2);
  CHECK(good.full_trap_probability() > 0.99);

  const auto weak = run_scenario(small_reduction(1.0));
  CHECK(weak.statistics.mean < 4.9);
  CHECK(weak.statistics.variance > 0.1);
  CHECK(!weak.fock.satisfied);
  CHECK(weak.statistics.variance <= weak.statistics.mean);
}

TEST_CASE("recipe halves the width and hits the requested depth exactly") {
  const double ui = 1e4 * pi * pi, uf = 1e2 * pi * pi;
  const auto initial = family_member(ui, 0.03, 1.0, TrapShape::bathtub);
  const auto final = recipe(ui, uf, initial);
  CHECK(final.half_width() == doctest::Approx(0.5));
  CHECK(final.relative_smoothness() == doctest::Approx(0.03));
  CHECK(dimensionless_depth(final) == doctest::Approx(uf).epsilon(1e-12));
  CHECK_THROWS_AS(recipe(uf, ui, initial), InvalidParameter);
  CHECK_THROWS_AS(recipe(2.0 * ui, uf, initial), InvalidParameter);
}

TEST_CASE("final trap wider in capacity than the initial one is flagged") {
  const auto r = run_scenario({flat(4, 0.05, 1.0), flat(6, 0.05, 1.0), GroundOccupation{4}});
  CHECK(r.final_capacity > r.initial_capacity);
  bool flagged = false;
  for (const auto& w : r.warnings) flagged |= w.find("exceeds initial capacity") != std::string::npos;
  CHECK(flagged);
}

TEST_CASE("sweeps are deterministic and independent of the thread count") {
  const std::vector<double> ratios{0.35, 0.5, 0.65, 0.8, 1.0};
  const auto base = small_reduction();
  const auto a = sweep_width_ratio(base, ratios, 1);
  const auto b = sweep_width_ratio(base, ratios, 3);
  REQUIRE(a.rows.size() == ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    CHECK(a.rows[i].parameter == ratios[i]);
    CHECK(a.rows[i].mean == b.rows[i].mean);
    CHECK(a.rows[i].variance == b.rows[i].variance);
    CHECK(a.rows[i].full_trap_probability == b.rows[i].full_trap_probability);
  }
  CHECK(a.warnings == b.warnings);
  CHECK_THROWS_AS(sweep_width_ratio(base, std::vector<double>{0.0}), InvalidParameter);
  CHECK_THROWS_AS(sweep_width_ratio(base, std::vector<double>{1.2}), InvalidParameter);
}

TEST_CASE("sweep means are stable under grid refinement") {
  const std::vector<double> ratios{0.3, 0.5, 0.7, 1.0};
  auto base = small_reduction();
  const auto coarse = sweep_width_ratio(base, ratios);
  base.grid_policy = base.grid_policy.refined();
  const auto fine = sweep_width_ratio(base, ratios);
  CHECK(fine.grid.size() > coarse.grid.size());
  for (std::size_t i = 0; i < ratios.size(); ++i)
    CHECK(std::abs(fine.rows[i].mean - coarse.rows[i].mean) < 1e-4);
}

TEST_CASE("smoothing adds levels near the brim") {
  const std::vector<double> sigmas{0.0, 0.05, 0.2, 0.5};
  const double v = 90.0 * pi * pi;
  const auto rows = capacity_vs_smoothness(v, 1.0, sigmas, {}, {}, 2);
  REQUIRE(rows.size() == sigmas.size());
  CHECK(rows[0].capacity == oracle::square_well_count(v, 1.0));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].capacity >= rows[i - 1].capacity);
    CHECK(rows[i].top_gap < rows[i - 1].top_gap);
  }
  CHECK(rows.back().capacity > rows[1].capacity);
  const auto deeper = capacity_vs_smoothness(2.0 * v, 1.0, std::vector<double>{0.2});
  CHECK(deeper[0].capacity > rows[2].capacity);
}

TEST_CASE("cold thermal filling reproduces the zero-temperature sweep") {
  const std::vector<double> ratios{0.4, 0.5, 0.6};
  ReductionScenario ground{flat(20, 0.03, 1.0), flat(4, 0.03, 0.5), GroundOccupation{16}};
  const auto zero = sweep_width_ratio(ground, ratios);
  ReductionScenario cold = ground;
  cold.occupation = MuRatioOccupation{400.0, 16.0};
  const auto thermal = sweep_width_ratio(cold, ratios);
  for (std::size_t i = 0; i < ratios.size(); ++i)
    CHECK(std::abs(thermal.rows[i].mean - zero.rows[i].mean) < 1e-6);
}

TEST_CASE("thermal occupations are normalized and consistent with an independent bisection") {
  ReductionScenario s{flat(20, 0.03, 1.0), flat(4, 0.03, 0.5), ThermalOccupation{30.0, 16.0}};
  const auto r = run_scenario(s);
  double total = 0.0;
  for (double w : r.occupation.weights) total += w;
  CHECK(std::abs(total - 16.0) < 1e-10);
  const auto initial = solve_bound_states(s.initial, r.grid);
  CHECK(*r.occupation.chemical_potential ==
        doctest::Approx(oracle::chemical_potential(initial.energies, 30.0, 16.0)).epsilon(1e-9));

  const auto sweep = temperature_sweep(s, std::vector<double>{20.0, 5.0}, std::vector<double>{0.5});
  REQUIRE(sweep.rows.size() == 2);
  CHECK(sweep.rows[0].temperature < sweep.rows[1].temperature);
  CHECK(sweep.rows[0].plateau_mean >= sweep.rows[1].plateau_mean);
  ReductionScenario ground = s;
  ground.occupation = GroundOccupation{16};
  CHECK_THROWS_AS(temperature_sweep(ground, std::vector<double>{5.0}, std::vector<double>{0.5}),
                  InvalidParameter);
}

TEST_CASE("errors carry scenario context") {
  ReductionScenario s{flat(4, 0.05, 1.0), flat(2, 0.05, 0.5), GroundOccupation{9}};
  try {
    run_scenario(s);
    FAIL("expected an exception");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("scenario") == 0);
  }
}

TEST_CASE("parallel_for visits every index once and rethrows the first failure") {
  std::vector<std::atomic<int>> hits(57);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_WITH_AS(parallel_for(10, 3,
                                    [](std::size_t i) {
                                      if (i == 4 || i == 7) throw std::runtime_error(std::to_string(i));
                                    }),
                       "4", std::runtime_error);
}

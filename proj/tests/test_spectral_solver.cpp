#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "fockprep/spectral_solver.hpp"
#include "oracles.hpp"

using namespace fockprep;
using std::numbers::pi;

namespace {

double inner(std::span<const double> a, std::span<const double> b, double dx) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * dx;
}

}  // namespace

TEST_CASE("three-point hamiltonian matches a dense diagonalization") {
  const auto trap = TrapSpec::square_well(50.0, 1.0);
  const Grid grid(-1.0, 1.0, 3);
  const auto h = discretize(trap, grid);
  REQUIRE(h.matrix.size() == 3);
  const double dx = grid.spacing();
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  for (int i = 0; i < 3; ++i) {
    a(i, i) = 2.0 / (dx * dx) + evaluate_potential(trap, grid[static_cast<std::size_t>(i)]);
    if (i < 2) a(i, i + 1) = a(i + 1, i) = -1.0 / (dx * dx);
  }
  const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(a).eigenvalues();
  const auto s = solve_bound_states(h);
  std::size_t expected = 0;
  for (int i = 0; i < 3; ++i) expected += ev[i] < -s.threshold ? 1 : 0;
  REQUIRE(s.capacity() == expected);
  for (std::size_t k = 0; k < s.capacity(); ++k)
    CHECK(s.energies[k] == doctest::Approx(ev[static_cast<Eigen::Index>(k)]).epsilon(1e-12));
}

TEST_CASE("zero depth has no bound states and a free-particle spectrum") {
  const auto trap = TrapSpec::square_well(0.0, 1.0);
  const Grid grid = Grid::symmetric(0.01, 3.0);
  const auto s = solve_bound_states(trap, grid);
  CHECK(s.capacity() == 0);
  CHECK(capacity(trap, grid) == 0);
  const auto h = discretize(trap, grid);
  const auto lowest = lowest_eigenpairs(h.matrix, 1);
  const double box = 6.0 + 2.0 * grid.spacing();
  CHECK(lowest.values[0] == doctest::Approx(pi * pi / (box * box)).epsilon(1e-3));
}

TEST_CASE("square well energies converge to the transcendental roots at second order") {
  const double v = 2.0, l = 1.0;
  const auto exact = oracle::square_well_energies(v, l);
  REQUIRE(exact.size() == 1);
  auto error_at = [&](double dx) {
    const auto s = solve_bound_states(TrapSpec::square_well(v, l), Grid::symmetric(dx, 15.0));
    REQUIRE(s.capacity() == exact.size());
    return std::abs(s.energies[0] - exact[0]);
  };
  const double e1 = error_at(0.02);
  const double e2 = error_at(0.01);
  CHECK(e2 < 1e-4 * std::abs(exact[0]));
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));

  // A deeper well with several levels.
  const auto deep = oracle::square_well_energies(400.0, 1.0);
  const auto s = solve_bound_states(TrapSpec::square_well(400.0, 1.0), Grid::symmetric(0.001, 4.0));
  REQUIRE(s.capacity() == deep.size());
  for (std::size_t k = 0; k < deep.size(); ++k)
    CHECK(std::abs(s.energies[k] - deep[k]) < 1e-4 * 400.0);
}

TEST_CASE("eigenfunctions are orthonormal, sign-fixed and alternate in parity") {
  const auto trap = TrapSpec::bathtub(900.0, 1.0, 0.05);
  const Grid grid = automatic_grid(trap);
  const auto s = solve_bound_states(trap, grid);
  REQUIRE(s.capacity() > 5);
  const double dx = grid.spacing();
  for (std::size_t a = 0; a < s.capacity(); ++a) {
    for (std::size_t b = 0; b <= a; ++b)
      CHECK(std::abs(inner(s.eigenfunction(a), s.eigenfunction(b), dx) - (a == b ? 1.0 : 0.0)) <
            1e-10);
    CHECK(parity(s, a) == (a % 2 == 0 ? Parity::even : Parity::odd));
    const auto phi = s.eigenfunction(a);
    double peak = 0.0;
    for (double x : phi) peak = std::max(peak, std::abs(x));
    for (double x : phi)
      if (std::abs(x) > 1e-6 * peak) {
        CHECK(x > 0.0);
        break;
      }
  }
}

TEST_CASE("energies are the Rayleigh quotients of their eigenfunctions") {
  const auto trap = TrapSpec::inverted_gaussian(300.0, 0.6);
  const Grid grid = automatic_grid(trap);
  const auto h = discretize(trap, grid);
  const auto s = solve_bound_states(h);
  REQUIRE(s.capacity() > 2);
  for (std::size_t k = 0; k < s.capacity(); ++k) {
    const auto phi = s.eigenfunction(k);
    const auto hphi = h.matrix.multiply(phi);
    CHECK(inner(phi, hphi, grid.spacing()) == doctest::Approx(s.energies[k]).epsilon(1e-9));
    CHECK(s.energies[k] < -s.threshold);
    if (k > 0) CHECK(s.energies[k] > s.energies[k - 1]);
  }
}

TEST_CASE("bound energies do not depend on the box once it is large enough") {
  const auto trap = TrapSpec::bathtub(400.0, 1.0, 0.05);
  const Grid grid = automatic_grid(trap);
  const double half = grid[grid.size() - 1];
  const auto a = solve_bound_states(trap, grid);
  const auto b = solve_bound_states(trap, Grid::symmetric(grid.spacing(), 2.0 * half));
  REQUIRE(a.capacity() == b.capacity());
  for (std::size_t k = 0; k < a.capacity(); ++k)
    CHECK(std::abs(a.energies[k] - b.energies[k]) <= 1e-8 * std::abs(b.energies[k]));
}

TEST_CASE("a very shallow well still binds exactly one state") {
  const auto trap = TrapSpec::square_well(0.05, 1.0);
  REQUIRE(oracle::square_well_count(0.05, 1.0) == 1);
  GridPolicy policy;
  policy.max_margin_half_widths = 200.0;
  const auto s = solve_bound_states(trap, automatic_grid(trap, policy));
  REQUIRE(s.capacity() == 1);
  CHECK(s.energies[0] ==
        doctest::Approx(oracle::square_well_energies(0.05, 1.0)[0]).epsilon(1e-2));
  CHECK(parity(s, 0) == Parity::even);
}

TEST_CASE("capacity grows with depth and with smoothing at fixed depth") {
  std::size_t previous = 0;
  for (double v : {10.0, 50.0, 200.0, 800.0}) {
    const auto trap = TrapSpec::bathtub(v, 1.0, 0.05);
    const std::size_t c = capacity(trap, automatic_grid(trap));
    CHECK(c >= previous);
    CHECK(c == solve_bound_states(trap, automatic_grid(trap)).capacity());
    previous = c;
  }
  const double v = 100.0 * pi * pi;
  std::size_t last = 0;
  for (double sigma : {0.0, 0.05, 0.2, 0.5}) {
    const auto trap = TrapSpec::bathtub(v, 1.0, sigma);
    const std::size_t c = capacity(trap, automatic_grid(trap));
    CHECK(c >= last);
    last = c;
  }
}

TEST_CASE("automatic grid places the wall on a node and reports resolution") {
  const auto trap = TrapSpec::square_well(400.0, 0.7);
  const Grid grid = automatic_grid(trap);
  CHECK(grid.is_symmetric());
  const double ratio = 0.7 / grid.spacing();
  CHECK(std::abs(ratio - std::round(ratio)) < 1e-9);

  const auto fine = check_resolution(trap, grid, 1e-2);
  CHECK(!fine.under_resolved);
  CHECK(fine.capacity == fine.refined_capacity);
  const auto coarse = check_resolution(trap, Grid::symmetric(0.1, 3.0), 1e-3);
  CHECK(coarse.under_resolved);
}

TEST_CASE("fixed point count overrides the spacing rules") {
  GridPolicy policy;
  policy.n_points = 501;
  const Grid grid = automatic_grid(TrapSpec::bathtub(100.0, 1.0, 0.05), policy);
  CHECK(grid.size() == 501);
}

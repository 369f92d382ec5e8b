#pragma once

// Real symmetric tridiagonal eigenproblems: Sturm-sequence counting, bisection
// for selected eigenvalues and inverse iteration for their eigenvectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fockprep/errors.hpp"

namespace fockprep {

struct SymmetricTridiagonal {
  std::vector<double> diagonal;      // size n
  std::vector<double> off_diagonal;  // size n-1, entry i couples rows i and i+1

  std::size_t size() const noexcept { return diagonal.size(); }

  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> gershgorin_bounds() const noexcept {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) {
      double radius = 0.0;
      if (i > 0) radius += std::abs(off_diagonal[i - 1]);
      if (i + 1 < n) radius += std::abs(off_diagonal[i]);
      lo = std::min(lo, diagonal[i] - radius);
      hi = std::max(hi, diagonal[i] + radius);
    }
    return {lo, hi};
  }

  double norm_bound() const noexcept {
    const auto [lo, hi] = gershgorin_bounds();
    return std::max(std::abs(lo), std::abs(hi));
  }

  std::vector<double> multiply(std::span<const double> v) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
      double acc = diagonal[i] * v[i];
      if (i > 0) acc += off_diagonal[i - 1] * v[i - 1];
      if (i + 1 < n) acc += off_diagonal[i] * v[i + 1];
      out[i] = acc;
    }
    return out;
  }
};

namespace detail {

inline double pivot_floor(const SymmetricTridiagonal& t) noexcept {
  double max_e2 = 1.0;
  for (double e : t.off_diagonal) max_e2 = std::max(max_e2, e * e);
  return std::numeric_limits<double>::min() * max_e2;
}

}  // namespace detail

/// Number of eigenvalues strictly below `shift` (Sturm sequence / LDL^T inertia).
inline std::size_t count_eigenvalues_below(const SymmetricTridiagonal& t, double shift) {
  const double pivmin = detail::pivot_floor(t);
  std::size_t count = 0;
  double q = t.diagonal[0] - shift;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double e = t.off_diagonal[i - 1];
    q = t.diagonal[i] - shift - e * e / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

/// k-th smallest eigenvalue (0-based) by bisection inside [lower, upper].
/// The bracket must contain it; callers pass the previous eigenvalue as `lower`.
inline double bisect_eigenvalue(const SymmetricTridiagonal& t, std::size_t k, double lower,
                                double upper) {
  const double eps = std::numeric_limits<double>::epsilon();
  const double abs_tol = 2.0 * detail::pivot_floor(t);
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lower + upper);
    if (upper - lower <= 2.0 * eps * std::max(std::abs(lower), std::abs(upper)) + abs_tol ||
        mid <= lower || mid >= upper)
      return mid;
    if (count_eigenvalues_below(t, mid) > k)
      upper = mid;
    else
      lower = mid;
  }
  return 0.5 * (lower + upper);
}

/// LU factorization of (T - shift I) with partial pivoting, kept in the banded
/// form needed by inverse iteration: U has two superdiagonals.
class ShiftedTridiagonalLU {
 public:
  ShiftedTridiagonalLU(const SymmetricTridiagonal& t, double shift) {
    const std::size_t n = t.size();
    u0_.resize(n);
    u1_.assign(n, 0.0);
    u2_.assign(n, 0.0);
    mult_.assign(n, 0.0);
    swapped_.assign(n, false);

    double diag = t.diagonal[0] - shift;
    double sup = n > 1 ? t.off_diagonal[0] : 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double sub = t.off_diagonal[k];
      const double next_diag = t.diagonal[k + 1] - shift;
      const double next_sup = k + 2 < n ? t.off_diagonal[k + 1] : 0.0;
      if (std::abs(diag) >= std::abs(sub)) {
        const double l = diag == 0.0 ? 0.0 : sub / diag;
        u0_[k] = diag;
        u1_[k] = sup;
        mult_[k] = l;
        diag = next_diag - l * sup;
        sup = next_sup;
      } else {
        const double l = diag / sub;
        u0_[k] = sub;
        u1_[k] = next_diag;
        u2_[k] = next_sup;
        mult_[k] = l;
        swapped_[k] = true;
        diag = sup - l * next_diag;
        sup = -l * next_sup;
      }
    }
    u0_[n - 1] = diag;

    // Exactly singular pivots are nudged; inverse iteration only needs direction.
    const double tiny = std::numeric_limits<double>::epsilon() * std::max(t.norm_bound(), 1.0);
    for (double& p : u0_)
      if (std::abs(p) < tiny) p = std::copysign(tiny, p == 0.0 ? 1.0 : p);
  }

  /// Solves (T - shift I) x = b in place.
  void solve(std::span<double> b) const {
    const std::size_t n = u0_.size();
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (swapped_[k]) std::swap(b[k], b[k + 1]);
      b[k + 1] -= mult_[k] * b[k];
    }
    b[n - 1] /= u0_[n - 1];
    if (n < 2) return;
    b[n - 2] = (b[n - 2] - u1_[n - 2] * b[n - 1]) / u0_[n - 2];
    for (std::size_t k = n - 2; k-- > 0;)
      b[k] = (b[k] - u1_[k] * b[k + 1] - u2_[k] * b[k + 2]) / u0_[k];
  }

 private:
  std::vector<double> u0_, u1_, u2_, mult_;
  std::vector<bool> swapped_;
};

struct EigenpairOptions {
  int inverse_iterations = 3;
  /// Relative residual ||T v - lambda v|| / ||T|| accepted after iterating.
  double residual_tolerance = 1e-10;
  std::uint_fast64_t seed = 0x5eed'f0c5;
};

/// Eigenpairs for the eigenvalue indices [0, count): bisection for values,
/// inverse iteration plus Gram-Schmidt against earlier vectors for vectors.
/// Vectors are returned with unit Euclidean norm, row-major (count x n).
struct TridiagonalEigenpairs {
  std::vector<double> values;
  std::vector<double> vectors;
};

inline TridiagonalEigenpairs lowest_eigenpairs(const SymmetricTridiagonal& t, std::size_t count,
                                               const EigenpairOptions& options = {}) {
  const std::size_t n = t.size();
  TridiagonalEigenpairs out;
  out.values.reserve(count);
  out.vectors.assign(count * n, 0.0);
  if (count == 0) return out;
  if (count > n) throw InvalidParameter("requested more eigenpairs than the matrix dimension");

  auto [lo, hi] = t.gershgorin_bounds();
  const double slack = 2.0 * std::numeric_limits<double>::epsilon() * std::max(t.norm_bound(), 1.0);
  lo -= slack;
  hi += slack;

  // Raw engine bits rather than a std distribution: the start vectors (and with them
  // the eigenvector roundoff) are then identical across standard libraries.
  std::mt19937_64 rng(options.seed);
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; };
  const double norm = std::max(t.norm_bound(), std::numeric_limits<double>::min());

  double lower = lo;
  for (std::size_t k = 0; k < count; ++k) {
    const double lambda = bisect_eigenvalue(t, k, lower, hi);
    out.values.push_back(lambda);
    lower = lambda - slack;

    const ShiftedTridiagonalLU lu(t, lambda);
    std::span<double> v(out.vectors.data() + k * n, n);
    for (double& x : v) x = unit();

    for (int it = 0; it < options.inverse_iterations; ++it) {
      lu.solve(v);
      for (std::size_t j = 0; j < k; ++j) {
        std::span<const double> w(out.vectors.data() + j * n, n);
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += w[i] * v[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * w[i];
      }
      double nrm = 0.0;
      for (double x : v) nrm += x * x;
      nrm = std::sqrt(nrm);
      if (!(nrm > 0.0) || !std::isfinite(nrm))
        throw NumericalError("inverse iteration broke down for eigenvalue index " +
                             std::to_string(k));
      for (double& x : v) x /= nrm;
    }

    const auto tv = t.multiply(v);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (tv[i] - lambda * v[i]) * (tv[i] - lambda * v[i]);
    if (std::sqrt(residual) > options.residual_tolerance * norm)
      throw NumericalError("inverse iteration did not converge for eigenvalue index " +
                           std::to_string(k) + " (relative residual " +
                           std::to_string(std::sqrt(residual) / norm) + ")");
  }
  return out;
}

}  // namespace fockprep

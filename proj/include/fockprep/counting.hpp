#pragma once

// Full counting statistics of the atoms left in the final trap after a sudden
// change. Everything derives from the C_f x C_f kernel
//   B_nm = <phi_n^f| Lambda_i |phi_m^f>,  Lambda_i = sum_k pi_k |phi_k^i><phi_k^i|,
// through the characteristic function F(theta) = det[I + (e^{i theta} - 1) B].

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockprep/errors.hpp"
#include "fockprep/occupation.hpp"
#include "fockprep/spectral_solver.hpp"

namespace fockprep {

/// S_kn = <phi_k^i | phi_n^f>, C_i x C_f.
struct OverlapMatrix {
  Eigen::MatrixXd values;

  Eigen::Index initial_levels() const noexcept { return values.rows(); }
  Eigen::Index final_levels() const noexcept { return values.cols(); }
};

inline OverlapMatrix overlap_matrix(const BoundSpectrum& initial, const BoundSpectrum& final) {
  if (!(initial.grid == final.grid))
    throw InvalidParameter("overlap_matrix: spectra are sampled on different grids");
  const auto n = static_cast<Eigen::Index>(initial.grid.size());
  const auto ci = static_cast<Eigen::Index>(initial.capacity());
  const auto cf = static_cast<Eigen::Index>(final.capacity());
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> phi_i(initial.eigenfunctions.data(), ci, n);
  const Eigen::Map<const RowMajor> phi_f(final.eigenfunctions.data(), cf, n);
  OverlapMatrix s;
  s.values = (phi_i * phi_f.transpose()) * initial.grid.spacing();
  return s;
}

struct KernelTolerances {
  double symmetry = 1e-12;
  double eigenvalue_slack = 1e-8;  // eigenvalues in [-slack, 1 + slack] are clamped
};

/// The kernel B with its validated eigenvalues, clamped to [0, 1].
class KernelMatrix {
 public:
  explicit KernelMatrix(Eigen::MatrixXd b, const KernelTolerances& tol = {}) : b_(std::move(b)) {
    if (b_.rows() != b_.cols()) throw InvalidParameter("kernel matrix must be square");
    if (b_.size() > 0) {
      const double asym = (b_ - b_.transpose()).cwiseAbs().maxCoeff();
      if (asym > tol.symmetry * std::max(1.0, b_.cwiseAbs().maxCoeff()))
        throw NumericalError("kernel matrix is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
      b_ = 0.5 * (b_ + b_.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b_, Eigen::EigenvaluesOnly);
      if (solver.info() != Eigen::Success) throw NumericalError("kernel eigensolver failed");
      const auto& ev = solver.eigenvalues();
      eigenvalues_.resize(static_cast<std::size_t>(ev.size()));
      std::size_t clamped = 0;
      double excursion = 0.0;
      for (Eigen::Index j = 0; j < ev.size(); ++j) {
        double lambda = ev[j];
        if (lambda < -tol.eigenvalue_slack || lambda > 1.0 + tol.eigenvalue_slack)
          throw NumericalError("kernel eigenvalue " + std::to_string(lambda) +
                               " outside [0,1]: eigenfunctions are not orthonormal");
        if (lambda < 0.0 || lambda > 1.0) {
          ++clamped;
          excursion = std::max(excursion, lambda < 0.0 ? -lambda : lambda - 1.0);
          lambda = std::clamp(lambda, 0.0, 1.0);
        }
        eigenvalues_[static_cast<std::size_t>(j)] = lambda;
      }
      if (clamped > 0) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "clamped %zu kernel eigenvalue(s) into [0,1], max excursion %.3g",
                      clamped, excursion);
        warnings_.emplace_back(buf);
      }
    }
  }

  const Eigen::MatrixXd& matrix() const noexcept { return b_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(b_.rows()); }
  /// Ascending, clamped to [0, 1].
  const std::vector<double>& eigenvalues() const noexcept { return eigenvalues_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  Eigen::MatrixXd b_;
  std::vector<double> eigenvalues_;
  std::vector<std::string> warnings_;
};

/// B_nm = sum_k pi_k S_kn S_km.
inline KernelMatrix kernel_matrix(const OverlapMatrix& s, const OccupationState& occ) {
  if (static_cast<Eigen::Index>(occ.weights.size()) != s.initial_levels())
    throw InvalidParameter("kernel_matrix: " + std::to_string(occ.weights.size()) +
                           " occupation weights for " + std::to_string(s.initial_levels()) +
                           " initial levels");
  const Eigen::Map<const Eigen::VectorXd> pi(occ.weights.data(),
                                             static_cast<Eigen::Index>(occ.weights.size()));
  Eigen::MatrixXd b = s.values.transpose() * pi.asDiagonal() * s.values;
  return KernelMatrix(std::move(b));
}

/// <N_f> = Tr B.
inline double mean_number(const KernelMatrix& b) { return b.matrix().trace(); }

/// sigma^2 = Tr B - Tr B^2.
inline double variance_number(const KernelMatrix& b) {
  return b.matrix().trace() - b.matrix().cwiseAbs2().sum();
}

/// F(theta) = det[I + (e^{i theta} - 1) B], by complex LU with partial pivoting.
inline std::complex<double> characteristic_function(const KernelMatrix& b, double theta) {
  const auto n = static_cast<Eigen::Index>(b.size());
  if (n == 0) return {1.0, 0.0};
  const double half = std::sin(0.5 * theta);
  const std::complex<double> z(-2.0 * half * half, std::sin(theta));  // e^{i theta} - 1
  Eigen::MatrixXcd a = z * b.matrix().cast<std::complex<double>>();
  a.diagonal().array() += 1.0;
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(a).determinant();
}

struct CountingStatistics {
  std::vector<double> probabilities;  // p(0..C_f)
  double mean = 0.0;
  double variance = 0.0;
  std::array<double, 3> cumulants{};  // kappa_1..kappa_3

  std::size_t final_capacity() const noexcept { return probabilities.size() - 1; }
};

/// kappa_1 = Tr B, kappa_2 = Tr B - Tr B^2, kappa_3 = Tr(B - 3B^2 + 2B^3).
inline std::array<double, 3> cumulants(const KernelMatrix& b) {
  const Eigen::MatrixXd& m = b.matrix();
  const Eigen::MatrixXd m2 = m * m;
  const double tr1 = m.trace();
  const double tr2 = m2.trace();
  const double tr3 = (m2.cwiseProduct(m)).sum();  // Tr(B^3) = sum_ij (B^2)_ij B_ji, B symmetric
  return {mean_number(b), variance_number(b), tr1 - 3.0 * tr2 + 2.0 * tr3};
}

namespace detail {

inline CountingStatistics finish_statistics(std::vector<double> p, const KernelMatrix& b,
                                            double negative_tolerance) {
  for (double& x : p) {
    if (x < -negative_tolerance)
      throw NumericalError("negative probability " + std::to_string(x) + " in number distribution");
    x = std::max(x, 0.0);
  }
  CountingStatistics stats;
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    m1 += static_cast<double>(n) * p[n];
    m2 += static_cast<double>(n * n) * p[n];
  }
  stats.probabilities = std::move(p);
  stats.mean = m1;
  stats.variance = m2 - m1 * m1;
  stats.cumulants = cumulants(b);
  return stats;
}

}  // namespace detail

/// p(n) by exact discrete inversion: F is a trigonometric polynomial of degree
/// C_f in e^{i theta} with non-negative frequencies only, so M = C_f + 1 samples
/// on [0, 2 pi) determine it.
inline CountingStatistics number_distribution(const KernelMatrix& b,
                                              double negative_tolerance = 1e-10) {
  const std::size_t cf = b.size();
  const std::size_t m = cf + 1;
  std::vector<std::complex<double>> samples(m);
  for (std::size_t k = 0; k < m; ++k)
    samples[k] = characteristic_function(
        b, 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m));

  std::vector<double> p(m);
  for (std::size_t n = 0; n < m; ++n) {
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const auto phase = static_cast<double>((n * k) % m);
      acc += std::polar(1.0, -2.0 * std::numbers::pi * phase / static_cast<double>(m)) * samples[k];
    }
    p[n] = acc.real() / static_cast<double>(m);
  }
  return detail::finish_statistics(std::move(p), b, negative_tolerance);
}

/// p(n) as the distribution of a sum of independent Bernoulli(lambda_j) trials,
/// lambda_j the eigenvalues of B, by sequential convolution.
inline std::vector<double> poisson_binomial_oracle(const KernelMatrix& b) {
  std::vector<double> p{1.0};
  for (double lambda : b.eigenvalues()) {
    std::vector<double> next(p.size() + 1, 0.0);
    for (std::size_t n = 0; n < p.size(); ++n) {
      next[n] += (1.0 - lambda) * p[n];
      next[n + 1] += lambda * p[n];
    }
    p = std::move(next);
  }
  return p;
}

/// Statistics from the eigenvalue route; the cheaper production path.
inline CountingStatistics poisson_binomial_statistics(const KernelMatrix& b,
                                                      double negative_tolerance = 1e-10) {
  return detail::finish_statistics(poisson_binomial_oracle(b), b, negative_tolerance);
}

struct FockCondition {
  double min_eigenvalue = 1.0;
  bool satisfied = true;
};

/// Lambda_f inside Lambda_i <=> every eigenvalue of B equals 1 (to within epsilon).
inline FockCondition fock_condition(const KernelMatrix& b, double epsilon) {
  FockCondition f;
  if (!b.eigenvalues().empty()) f.min_eigenvalue = b.eigenvalues().front();
  f.satisfied = f.min_eigenvalue >= 1.0 - epsilon;
  return f;
}

}  // namespace fockprep

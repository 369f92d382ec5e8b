#pragma once

// One-dimensional trapping potentials and the uniform grid they are sampled on.
//
// Units throughout the library: hbar^2/2m = 1 and lengths in units of the
// initial trap half-width. Energies are then V*L^2-dimensionless and the
// kinetic operator is simply -d^2/dx^2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "fockprep/errors.hpp"

namespace fockprep {

enum class TrapShape { bathtub, inverted_gaussian, square_well };

inline std::string_view to_string(TrapShape shape) noexcept {
  switch (shape) {
    case TrapShape::bathtub: return "bathtub";
    case TrapShape::inverted_gaussian: return "gaussian";
    case TrapShape::square_well: return "square";
  }
  return "unknown";
}

inline TrapShape trap_shape_from_string(std::string_view name) {
  if (name == "bathtub") return TrapShape::bathtub;
  if (name == "gaussian" || name == "inverted_gaussian") return TrapShape::inverted_gaussian;
  if (name == "square" || name == "square_well") return TrapShape::square_well;
  throw InvalidParameter("unknown trap shape '" + std::string(name) + "'");
}

/// A parameterized, even, non-positive 1D trap.
///
/// For the inverted Gaussian `half_width` holds the width parameter delta.
/// `smoothness` is only meaningful for the bathtub; a bathtub with zero
/// smoothness is represented as a square well.
class TrapSpec {
 public:
  static TrapSpec bathtub(double depth, double half_width, double smoothness) {
    if (!(smoothness >= 0.0) || !std::isfinite(smoothness))
      throw InvalidParameter("trap smoothness must be >= 0");
    if (smoothness == 0.0) return square_well(depth, half_width);
    return TrapSpec(TrapShape::bathtub, depth, half_width, smoothness);
  }
  static TrapSpec square_well(double depth, double half_width) {
    return TrapSpec(TrapShape::square_well, depth, half_width, 0.0);
  }
  static TrapSpec inverted_gaussian(double depth, double width) {
    return TrapSpec(TrapShape::inverted_gaussian, depth, width, 0.0);
  }
  /// Dispatches on shape; `smoothness` is ignored unless shape is bathtub.
  static TrapSpec make(TrapShape shape, double depth, double half_width, double smoothness) {
    switch (shape) {
      case TrapShape::bathtub: return bathtub(depth, half_width, smoothness);
      case TrapShape::inverted_gaussian: return inverted_gaussian(depth, half_width);
      case TrapShape::square_well: return square_well(depth, half_width);
    }
    throw InvalidParameter("unknown trap shape");
  }

  TrapShape shape() const noexcept { return shape_; }
  double depth() const noexcept { return depth_; }
  double half_width() const noexcept { return half_width_; }
  double smoothness() const noexcept { return smoothness_; }
  double relative_smoothness() const noexcept { return smoothness_ / half_width_; }

  friend bool operator==(const TrapSpec&, const TrapSpec&) = default;

 private:
  TrapSpec(TrapShape shape, double depth, double half_width, double smoothness)
      : shape_(shape), depth_(depth), half_width_(half_width), smoothness_(smoothness) {
    if (!(depth >= 0.0) || !std::isfinite(depth)) throw InvalidParameter("trap depth must be >= 0");
    if (!(half_width > 0.0) || !std::isfinite(half_width))
      throw InvalidParameter("trap half-width must be > 0");
  }

  TrapShape shape_;
  double depth_;
  double half_width_;
  double smoothness_;
};

/// V(x). Total on valid specs, even in x and bounded by [-V, 0].
inline double evaluate_potential(const TrapSpec& spec, double x) noexcept {
  const double ax = std::abs(x);
  const double v = spec.depth();
  switch (spec.shape()) {
    case TrapShape::bathtub: {
      // -(V/2)[1 - tanh(u)] == -V / (1 + e^{2u}); this form has no cancellation for u >> 1.
      const double u = (ax - spec.half_width()) / spec.smoothness();
      return -v / (1.0 + std::exp(2.0 * u));
    }
    case TrapShape::inverted_gaussian: {
      const double d = spec.half_width();
      return -v * std::exp(-x * x / (2.0 * d * d));
    }
    case TrapShape::square_well:
      // A node sitting on the wall takes the mid value, the sigma -> 0 limit of the bathtub.
      if (std::abs(ax - spec.half_width()) <= 1e-12 * spec.half_width()) return -0.5 * v;
      return ax < spec.half_width() ? -v : 0.0;
  }
  return 0.0;
}

/// Offset in sqrt(U) for flat-bottomed traps: sqrt(U) = 2 L sqrt(V) + pi/2.
/// With it a square well of label U holds round(sqrt(U)/pi) bound states, so
/// U = C^2 pi^2 lands halfway between the C-th and (C+1)-th binding thresholds.
inline constexpr double kFlatTrapPhaseOffset = std::numbers::pi / 2.0;

/// Human-readable statement of the U convention, echoed into output metadata.
inline constexpr std::string_view kUConvention =
    "flat traps: sqrt(U) = 2*L*sqrt(V) + pi/2; gaussian: U = V*delta^2 (hbar^2/2m = 1)";

/// Dimensionless depth U labeling the isospectral family of `spec`.
/// Depends on (V, L) only through V*L^2, and is increasing in V.
inline double dimensionless_depth(const TrapSpec& spec) noexcept {
  const double v = spec.depth();
  const double l = spec.half_width();
  if (spec.shape() == TrapShape::inverted_gaussian) return v * l * l;
  const double root = 2.0 * l * std::sqrt(v) + kFlatTrapPhaseOffset;
  return root * root;
}

/// Member of the (U, relative smoothness) family with half-width L.
inline TrapSpec family_member(double dimensionless_depth, double relative_smoothness,
                              double half_width, TrapShape shape) {
  if (!(dimensionless_depth > 0.0)) throw InvalidParameter("U must be > 0");
  if (!(half_width > 0.0)) throw InvalidParameter("half-width must be > 0");
  if (!(relative_smoothness >= 0.0)) throw InvalidParameter("relative smoothness must be >= 0");
  if (shape == TrapShape::inverted_gaussian)
    return TrapSpec::inverted_gaussian(dimensionless_depth / (half_width * half_width), half_width);

  const double root = std::sqrt(dimensionless_depth) - kFlatTrapPhaseOffset;
  if (!(root > 0.0))
    throw InvalidParameter("U must exceed pi^2/4 for flat-bottomed traps (U = " +
                           std::to_string(dimensionless_depth) + ")");
  const double depth = (root / (2.0 * half_width)) * (root / (2.0 * half_width));
  if (shape == TrapShape::square_well) return TrapSpec::square_well(depth, half_width);
  return TrapSpec::bathtub(depth, half_width, relative_smoothness * half_width);
}

/// Uniform grid x_j = x_min + j*dx, j = 0..n_points-1.
class Grid {
 public:
  Grid(double x_min, double x_max, std::size_t n_points)
      : x_min_(x_min), x_max_(x_max), n_points_(n_points) {
    if (n_points < 3) throw InvalidParameter("grid needs at least 3 points");
    if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max))
      throw InvalidParameter("grid spacing must be positive");
  }

  /// Symmetric grid with nodes at 0 and +-k*spacing, covering [-half_extent, half_extent].
  static Grid symmetric(double spacing, double half_extent) {
    if (!(spacing > 0.0)) throw InvalidParameter("grid spacing must be positive");
    const auto half = static_cast<std::size_t>(std::ceil(half_extent / spacing - 1e-9));
    const std::size_t h = std::max<std::size_t>(half, 1);
    const double edge = static_cast<double>(h) * spacing;
    return Grid(-edge, edge, 2 * h + 1);
  }

  double x_min() const noexcept { return x_min_; }
  double x_max() const noexcept { return x_max_; }
  std::size_t size() const noexcept { return n_points_; }
  double spacing() const noexcept { return (x_max_ - x_min_) / static_cast<double>(n_points_ - 1); }
  /// Symmetric grids are evaluated about the centre so that x[n-1-j] == -x[j] exactly.
  double operator[](std::size_t j) const noexcept {
    if (is_symmetric() && n_points_ % 2 == 1) {
      const auto centre = static_cast<std::ptrdiff_t>(n_points_ / 2);
      return static_cast<double>(static_cast<std::ptrdiff_t>(j) - centre) * spacing();
    }
    return x_min_ + static_cast<double>(j) * spacing();
  }
  std::vector<double> points() const {
    std::vector<double> xs(n_points_);
    for (std::size_t j = 0; j < n_points_; ++j) xs[j] = (*this)[j];
    return xs;
  }
  bool is_symmetric() const noexcept { return x_min_ == -x_max_; }

  /// Same box, spacing halved.
  Grid refined() const { return Grid(x_min_, x_max_, 2 * n_points_ - 1); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double x_min_;
  double x_max_;
  std::size_t n_points_;
};

}  // namespace fockprep

#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "innerforge/common.hpp"
#include "innerforge/weights.hpp"

namespace innerforge {

/// A smooth increasing phase target f with its derivative.
struct PhaseFunction {
  std::function<double(double)> f;
  std::function<double(double)> fprime;
  Interval window;
  /// Weight that f' is expected to be comparable to, when known.
  std::optional<Weight> reference;
};

/// Sorted finite point set on a window.
///
/// Storage is 0-based; origin() is the storage index of the smallest
/// nonnegative point (0 when every point is negative), so the conventional
/// label of points()[i] is i - origin().
class Lattice {
 public:
  Lattice() = default;
  /// Throws monotonicity error if points are not strictly increasing, window
  /// error if a point lies outside the window.
  Lattice(std::vector<double> points, Interval window);

  const std::vector<double>& points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  double operator[](std::size_t i) const { return points_[i]; }
  Interval window() const noexcept { return window_; }
  std::size_t origin() const noexcept { return origin_; }

  /// ω_i = (λ_i + λ_{i+1})/2, size() - 1 entries.
  std::vector<double> midpoints() const;

  /// Storage index of the largest point <= x, or -1.
  long index_at_or_below(double x) const;

 private:
  std::vector<double> points_;
  Interval window_;
  std::size_t origin_ = 0;
};

/// n_Λ(x): #(0, x] for x >= 0, -#(x, 0) for x < 0. Nondecreasing, right-continuous,
/// n_Λ(0) = 0; it jumps by 1 at every nonzero point and not at 0.
long counting_function(const Lattice& lattice, double x);

/// All solutions of f(λ) ∈ 2πZ in window.
Lattice level_set(const PhaseFunction& f, Interval window, double tol = 1e-12);

struct SeparationStats {
  double delta_sep = 0;  // min consecutive d_α
  double gap_max = 0;    // max consecutive d_α
  std::size_t argmin = 0;
  std::size_t argmax = 0;
};

SeparationStats separation_stats(const Weight& w, const Lattice& lattice);

/// Range of α'(λ_n)(λ_{n+1} - λ_n) over consecutive pairs.
struct GapComparability {
  double c = 0;
  double C = 0;
};

GapComparability gap_comparability(const Weight& w, const Lattice& lattice);

DensityReport upper_density(const Weight& w, const Lattice& lattice, std::span<const double> r_list);
DensityReport lower_density(const Weight& w, const Lattice& lattice, std::span<const double> r_list);

struct BlockCount {
  double alpha_left = 0;
  double alpha_right = 0;
  std::size_t original = 0;
  std::size_t added = 0;
  long target = 0;  // cumulative n_Λ' at the outer block end
};

struct RegularizationResult {
  Lattice lattice;
  double delta = 0;
  double N0 = 0;
  std::vector<BlockCount> blocks;
  std::size_t added = 0;
  /// sup |(1-δ)α - 2π n_Λ'| over the window, exact for the step function.
  double sup_deviation = 0;
  double sup_at = 0;
  /// 2π N0 + 2π + 1.
  double certified_bound = 0;
  double separation = 0;
};

/// Enlarges Λ inside its window (which must contain 0) so that
/// (1-δ)α - 2π n_Λ' stays bounded. Throws threshold error when the density
/// precondition fails, packing error when no admissible insertion point
/// exists in a block.
RegularizationResult regularize(const Weight& w, const Lattice& lattice, double delta, double N0,
                                double sep_min, std::size_t min_new = 3);

/// One decimal number per line; blank lines and '#' comments skipped.
/// Throws io error naming the offending line.
std::vector<double> read_points(std::istream& in);

}  // namespace innerforge

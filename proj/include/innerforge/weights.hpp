#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "innerforge/common.hpp"

namespace innerforge {

enum class WeightFamily { linear, power, sampled, sum };

std::string_view to_string(WeightFamily family);

struct WeightValue {
  double alpha = 0;   // α(x), normalized so α(0) = 0
  double alpha1 = 0;  // α'(x)
  double alpha2 = 0;  // α''(x)
};

class Weight;

/// One term c·α_i of a composite-sum weight.
struct WeightTerm {
  double coefficient;
  std::shared_ptr<const Weight> weight;
};

/// An increasing weight α with α' > 0 on its evaluation window.
///
/// Copies share the immutable implementation; every evaluator is const and
/// safe to call concurrently.
class Weight {
 public:
  /// α(x) = scale·x.
  static Weight linear(double scale = 1.0);

  /// α'(x) = scale·<x>^kappa, kappa > -1. Closed-form antiderivative for
  /// kappa in {0, 1, 2}; otherwise an antiderivative cache is built eagerly
  /// over cache_window.
  static Weight power(double kappa, double scale = 1.0,
                      Interval cache_window = Interval{-1.0e4, 1.0e4});

  /// α' given by samples (x_i, α'_i), interpolated by a monotone cubic
  /// (Fritsch-Carlson). α is the exact antiderivative of the interpolant,
  /// normalized to vanish at 0 (or at the left end when 0 is outside).
  static Weight sampled(std::vector<double> x, std::vector<double> alpha1);

  /// α = Σ c_i α_i. Coefficients may be negative as long as α' stays
  /// positive on the common window (checked on a probe grid).
  static Weight sum(std::vector<std::pair<double, Weight>> terms);

  WeightFamily family() const;
  Interval window() const;
  /// Power exponent (power family), NaN otherwise.
  double kappa() const;
  double scale() const;

  /// Throws a window error outside window(), numeric error on non-finite output.
  WeightValue eval(double x) const;
  double alpha(double x) const;
  double alpha1(double x) const;
  double alpha2(double x) const;

  /// α^{-1}(a) within the window.
  double inverse(double a) const;

  /// d_α(x, y) = |α(x) − α(y)|.
  double distance(double x, double y) const;

  /// α([a, b]) = ∫_a^b α'.
  double length(Interval I) const;

  struct Impl;

 private:
  explicit Weight(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

struct ProbeExtreme {
  double value = 0;
  double x = 0;
  double y = 0;
};

/// Empirical constants for the regular-locally-doubling conditions.
///
/// The lower-growth exponent is stored signed: kappa_hat is the exponent in
/// c·<x>^kappa_hat <= α'(x) (the hypothesis needs kappa_hat > -1).
struct RegularityReport {
  Interval window;
  double R = 1.0;
  std::size_t probes = 0;
  std::uint64_t seed = 0;

  ProbeExtreme m;  // min α'(x)/α'(y) over pairs with d_α <= 1, |x|,|y| >= R
  ProbeExtreme M;  // max of the same ratio
  ProbeExtreme C;  // sup |α''|/α'^2 over |x| >= R (y unused)
  double kappa_hat = 0;
  double c_hat = 0;
  double K0_hat = 0;
  double C_upper = 0;

  // Same statistics on the inner half of the window, used to detect
  // constants that keep growing with the probe range.
  double m_inner = 0;
  double M_inner = 0;
  double C_inner = 0;

  bool comparability_pass = false;
  bool doubling_pass = false;
  bool lower_growth_pass = false;

  bool pass() const { return comparability_pass && doubling_pass && lower_growth_pass; }
};

RegularityReport regularity_report(const Weight& w, Interval window, std::size_t probes,
                                   double R = 1.0, std::uint64_t seed = 1);

enum class DensityKind { upper, lower };

struct DensityRow {
  double r = 0;
  double ratio = 0;
  std::size_t count = 0;
  double interval_left = 0;
  double interval_right = 0;
};

struct DensityReport {
  DensityKind kind = DensityKind::upper;
  std::vector<DensityRow> rows;
  double limit_estimate = 0;      // ratio at the largest r
  std::vector<double> trend;      // ratios at the last (up to) three r values
  double threshold = 1.0 / kTwoPi;
};

/// Extremal #(Λ ∩ I)/r over intervals I ⊆ window with α(I) = r.
/// points must be sorted and inside window.
DensityReport upper_density(const Weight& w, std::span<const double> points, Interval window,
                            std::span<const double> r_list);
DensityReport lower_density(const Weight& w, std::span<const double> points, Interval window,
                            std::span<const double> r_list);

}  // namespace innerforge

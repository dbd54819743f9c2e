#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "innerforge/conjugation.hpp"
#include "innerforge/lattice.hpp"
#include "innerforge/weights.hpp"

namespace innerforge {

/// Measured phase fit of an InnerJ built from a phase target f.
struct PhaseCertificate {
  std::size_t grid_points = 0;
  double constant = 0;       // offset removed from f - arg J (midrange)
  double sup_error = 0;      // sup |f - arg J - constant|
  double bound = kTwoPi;     // 2π
  double tail_budget = 0;    // π·(tail bound of the conjugate)
  bool monotone = true;      // arg J strictly increasing on the grid
  double ratio_min = 0;      // min f'/α' over probes
  double ratio_max = 0;
  bool hypothesis_pass = true;
  bool forced = false;
  bool pass() const { return monotone && sup_error <= bound + tail_budget; }
};

/// Meromorphic inner function with {J = 1} = Λ and {J = -1} = midpoints,
/// built from the ±1/2 step function u of the (tail-extended) lattice:
/// (1 + J)/(1 - J) = exp(iπ·Su).
///
/// Node arguments n refer to storage indices of the source lattice.
class InnerJ {
 public:
  /// Size error for fewer than 3 points, tail error when the truncation
  /// bound is not finite.
  static InnerJ build(const Weight& w, const Lattice& lattice, const TailPolicy& tail = {});

  const Weight& weight() const noexcept { return weight_; }
  const Lattice& lattice() const noexcept { return lattice_; }
  const HalfIndicator& u() const noexcept { return u_; }
  const TailPolicy& tail() const noexcept { return tail_; }
  double tail_bound() const noexcept { return u_.tail_bound(); }

  /// log C★, matched between the regularized and unregularized exponents at z = i.
  double log_cstar() const noexcept { return log_cstar_; }

  /// ũ(x); singularity error at a node or midpoint.
  double conj_u(double x) const;
  std::complex<double> eval(double x) const;
  double arg(double x) const;

  double jprime_at_omega(std::size_t n) const;
  double jprime_at_lambda(std::size_t n) const;
  /// log A_n <= 0: the gap product of the residue at ω_n.
  double log_A(std::size_t n) const;
  /// |J'(x)| from the Clark series; redirect error at a node.
  double jprime(double x) const;
  /// Same, forcing one series: true = σ₁ (nodes λ), false = σ₋₁ (midpoints).
  double jprime_series(double x, bool sigma_one) const;

  double sigma_one(std::size_t n) const;        // σ₁({λ_n})
  double sigma_minus_one(std::size_t n) const;  // σ₋₁({ω_n})

  /// Phase-fit record; present when built through approximate_phase.
  const std::optional<PhaseCertificate>& certificate() const noexcept { return certificate_; }
  void set_certificate(PhaseCertificate c) { certificate_ = c; }

 private:
  InnerJ(Weight w, Lattice lattice, HalfIndicator u, TailPolicy tail);

  // Extended-node index of window index n.
  std::size_t ext(std::size_t n) const { return u_.window_first() + n; }
  // J-nodes are nodes()[0 .. N-2].
  std::size_t jnode_count() const { return u_.mids().size(); }
  double log_residue_omega(std::size_t k) const;
  double log_residue_lambda(std::size_t k) const;

  Weight weight_;
  Lattice lattice_;
  HalfIndicator u_;
  TailPolicy tail_;
  double log_cstar_ = 0;
  std::size_t origin_ = 0;          // extended index of the arg-normalizing node
  std::vector<double> sigma_one_;   // per J-node (extended index)
  std::vector<double> sigma_minus_; // per midpoint (extended index)
  std::optional<PhaseCertificate> certificate_;
};

struct PhaseOptions {
  /// Allowed spread max(f'/α')/min(f'/α') over the probes.
  double ratio_band = 16.0;
  std::size_t probes = 2000;
  std::uint64_t seed = 1;
  std::size_t grid_points = 10000;
  bool force = false;
  double root_tol = 1e-12;
};

/// win doubled about 0 until its α-length reaches min_length, clamped to
/// w.window().
Interval widen_window(const Weight& w, Interval win, double min_length);

/// level_set of f followed by InnerJ::build, with the measured phase bound
/// attached. Hypothesis error when f' is not comparable to α' (unless forced).
InnerJ approximate_phase(const Weight& w, const PhaseFunction& f, const TailPolicy& tail = {},
                         const PhaseOptions& options = {});

/// Polynomial envelopes for |J'|: upper on a grid, lower at the nodes.
struct DerivativeCertificate {
  int N0 = 0;
  double slope_upper = 0;  // LS slope of log|J'| against log(<x><α'>)
  double slope_lower = 0;  // LS slope of -log|J'(λ)| against log(<λ>α'(λ))
  double C_upper = 0;      // |J'(x)| <= C_upper (<x><α'(x)>)^N0
  double C_lower = 0;      // (<λ>α'(λ))^-N0 <= C_lower |J'(λ)|
  std::size_t grid_points = 0;
  std::size_t nodes = 0;
};

DerivativeCertificate fit_derivative_certificate(const InnerJ& J, std::size_t grid_points = 2000);

/// Θ = S_a · Blaschke product over zeros x_n + i y_n (y_n > 0).
struct BlaschkeInner {
  double a = 0;
  std::vector<std::complex<double>> zeros;

  /// Domain error for y_n <= 0 or a < 0, degenerate error for Θ constant.
  void validate() const;
};

double blaschke_arg_prime(const BlaschkeInner& B, double x);
/// a·x + 2Σ[atan((x - x_n)/y_n) + atan(x_n/y_n)], zero at the origin.
double blaschke_arg(const BlaschkeInner& B, double x);

}  // namespace innerforge

#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "innerforge/common.hpp"
#include "innerforge/lattice.hpp"
#include "innerforge/weights.hpp"

namespace innerforge {

using Complex = std::complex<double>;

/// Growth of a sampled function beyond its last samples.
enum class GrowthKind { bounded, log, poly };

struct GrowthClass {
  GrowthKind kind = GrowthKind::bounded;
  double K = 0;  // exponent for poly

  /// "bounded", "log" or "poly:K". Throws usage error otherwise.
  static GrowthClass parse(std::string_view text);
  std::string str() const;
};

/// Function known at sorted abscissae, linearly interpolated inside the
/// sample range and continued outside according to its growth class
/// (constant, a + b·log<t>, or a + b·<t>^K, matched to the two outermost
/// samples on each side).
class SampledFunction {
 public:
  SampledFunction(std::vector<double> x, std::vector<double> values, GrowthClass growth = {});

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<double>& values() const noexcept { return v_; }
  const GrowthClass& growth() const noexcept { return growth_; }
  Interval range() const noexcept { return {x_.front(), x_.back()}; }

  double operator()(double t) const;

  /// Conjugate by the exact piecewise-linear formula plus analytic tails.
  double conjugate(double t) const;

  struct Tail {
    double a = 0;
    double b = 0;  // s(t) = a + b·g(t) beyond the edge
  };
  Tail left_tail() const noexcept { return left_; }
  Tail right_tail() const noexcept { return right_; }
  /// g(t) of the growth class (1 for bounded).
  double growth_profile(double t) const;

 private:
  std::vector<double> x_;
  std::vector<double> v_;
  GrowthClass growth_;
  Tail left_;
  Tail right_;
  std::vector<double> slope_jump_;  // m_{k+1} - m_k at knot k, outer slopes 0
  double constant_ = 0;
};

/// background + Σ value_i·1_(a_i, b_i), pieces disjoint.
struct Piece {
  double a;
  double b;
  double value;
};

class PiecewiseConstant {
 public:
  explicit PiecewiseConstant(std::vector<Piece> pieces, double background = 0);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }
  double background() const noexcept { return background_; }
  double operator()(double t) const;
  std::vector<double> breakpoints() const;

 private:
  std::vector<Piece> pieces_;
  double background_;
};

enum class TailMode { alpha_regular, zero };

/// How a finite lattice is continued past its window before u is built.
struct TailPolicy {
  TailMode mode = TailMode::alpha_regular;
  /// Extension width on each side, in multiples of the window α-length.
  double width_factor = 5.0;

  static TailMode parse_mode(std::string_view text);
};

std::string_view to_string(TailMode mode);

/// u = +1/2 on ∪(λ_k, ω_k), -1/2 elsewhere, for a finite node list
/// λ_0 < … < λ_{N-1} with ω_k = (λ_k + λ_{k+1})/2, k < N-1.
class HalfIndicator {
 public:
  explicit HalfIndicator(std::vector<double> nodes);

  /// Nodes of the lattice continued past its window per the tail policy.
  static HalfIndicator build(const Weight& w, const Lattice& lattice, const TailPolicy& tail);

  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& mids() const noexcept { return mids_; }
  /// Storage range [first, last] of the original lattice within nodes().
  std::size_t window_first() const noexcept { return first_; }
  std::size_t window_last() const noexcept { return last_; }
  double tail_bound() const noexcept { return tail_bound_; }
  /// Mean α-gap used for the continuation (0 for zero mode).
  double extension_step() const noexcept { return step_; }

  double operator()(double t) const;
  PiecewiseConstant piecewise() const;

  /// (1/2π) log((1 + ω_k²)/(1 + λ_k²)), regularization term of gap k.
  const std::vector<double>& gap_constants() const noexcept { return gap_const_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> mids_;
  std::vector<double> gap_const_;
  std::size_t first_ = 0;
  std::size_t last_ = 0;
  double tail_bound_ = 0;
  double step_ = 0;
};

/// Closed-form conjugate; singularity error at a breakpoint.
double hilbert_piecewise(const HalfIndicator& u, double x);
double hilbert_piecewise(const PiecewiseConstant& u, double x);

/// Principal-value quadrature of (1/π)∫(1/(x-t) + t/(1+t²)) s(t) dt with
/// analytic tails. Accuracy error when the estimate exceeds tol.
double hilbert_quadrature(const SampledFunction& s, double x, double tol = 1e-10);
double hilbert_quadrature(const PiecewiseConstant& s, double x, double tol = 1e-10);
double hilbert_quadrature(const HalfIndicator& u, double x, double tol = 1e-10);

/// S s(z) = P s(z) + i Q s(z) for Im z > 0; domain error otherwise.
Complex schwartz_upper(const HalfIndicator& u, Complex z);
Complex schwartz_upper(const PiecewiseConstant& u, Complex z);
Complex schwartz_upper(const SampledFunction& s, Complex z);

struct GrowthBoundReport {
  bool applicable = true;
  std::string note;
  double K = 0;
  double derivative_ratio = 0;  // max |s'|/<x>^K over the samples
  double C = 0;                 // fitted constant in |s~'| <= C(log(1+|x|) + <x>^K)
  double worst_x = 0;
  std::vector<double> grid;
  std::vector<double> ratios;
};

GrowthBoundReport growth_bound_check(const SampledFunction& s, double K);

struct ZygmundReport {
  double integral = 0;  // window part
  double tail = 0;
  double total() const { return integral + tail; }
};

/// ∫ exp(|(s/‖s‖∞)~|) dt/(1+t²) over window (default: sample range).
ZygmundReport zygmund_integral(const SampledFunction& s);
ZygmundReport zygmund_integral(const SampledFunction& s, Interval window);

/// ∫ |s| dt/(1+t²) including the class tails; +inf when divergent.
double poisson_norm(const SampledFunction& s);

}  // namespace innerforge

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "innerforge/conjugation.hpp"
#include "innerforge/inner.hpp"
#include "innerforge/lattice.hpp"
#include "innerforge/weights.hpp"

namespace innerforge {

/// Unimodular symbol U with arg U = -α + h.
struct Symbol {
  Weight alpha = Weight::linear();
  std::optional<SampledFunction> h;
  double K1 = 0;  // declared |h'| ≲ <x>^K1

  double arg(double x) const { return -alpha.alpha(x) + (h ? (*h)(x) : 0.0); }
};

struct ZeroSetConfig {
  TailPolicy tail;
  /// α-lengths for the density gate; empty means {L/8, L/4, L/2} of the window.
  std::vector<double> r_list;
  std::optional<double> eps;
  std::optional<double> sep_min;
  double grid_per_unit = 8.0;  // uniform-in-α grid density for log m
  std::size_t regularity_probes = 10000;
  std::uint64_t seed = 1;
};

struct NodeResidual {
  double lambda = 0;
  bool original = false;  // λ ∈ Λ (otherwise inserted by regularization)
  double abs_T = 0;       // |1 - J(λ)|·m(λ)
  double abs_Tprime = 0;  // |J'(λ)|·m(λ)
  double m = 0;
  double floor_value = 0;  // |T'(λ)|·<λ>^N
};

struct GrowthFit {
  double N = 0;
  double c = 0;  // c<x>^-N <= m
  double C = 0;  // m <= C<x>^N
  double slope = 0;
};

struct ZeroSetWitness {
  Lattice input;
  RegularizationResult regularization;
  double upper_density = 0;
  double delta = 0;
  double eps = 0;
  double N0 = 0;
  double inf_alpha1 = 0;
  std::shared_ptr<const InnerJ> J;  // for Λ'
  std::shared_ptr<const InnerJ> I;  // for δα - 2εx
  std::vector<double> grid;
  std::vector<double> log_m;
  GrowthFit growth;
  std::vector<NodeResidual> residuals;
  double derivative_floor = 0;  // min over Λ' of |T'(λ)|<λ>^N
  double h_sup = 0;
  double zygmund = 0;
  std::vector<std::string> warnings;

  double m_at(double x) const;
};

/// Threshold error when the measured upper density is >= 1/2π, hypothesis
/// error when the weight fails its regularity check, epsilon error when
/// δα' - 2ε is not positive on the window.
ZeroSetWitness zero_set_pipeline(const Symbol& sym, const Lattice& lattice, const ZeroSetConfig& config = {});

/// log m = -1/2 Σ (part)~ on the shared grid of the parts.
SampledFunction modulus_from_phase(const std::vector<SampledFunction>& parts);

/// Fits c<x>^-N <= m <= C<x>^N on the grid (sandwich asserted).
GrowthFit fit_growth(const std::vector<double>& x, const std::vector<double>& log_m);

struct NecessityRow {
  double a = 0;        // α(a_n) = n·N0
  long count = 0;      // n_Λ(a_n)
  long block_count = 0;
  bool block_pass = false;  // 2π·#(Λ ∩ I) > (1 + δ)α(I)
  double value = 0;    // 2π n_Λ(a_n) - α(a_n)
};

struct NecessityCertificate {
  double delta = 0;
  double N0 = 0;
  double lower_density = 0;
  std::vector<NecessityRow> rows;
  double slope = 0;
};

/// Not-applicable error unless the lower density exceeds (1 + δ)/2π;
/// verification error if a telescoped value fails 2π n_Λ(a_n) - α(a_n) > δα(a_n).
NecessityCertificate necessity_certificate(const Weight& w, const Lattice& lattice, double delta, double N0);

struct TValue {
  double abs_T = 0;
  std::string note;
};

/// |T(x)| = |1 - J(x)|·m(x); at a node of Λ' the note carries |J'(λ)|m(λ).
TValue eval_T(const ZeroSetWitness& wit, double x);

}  // namespace innerforge

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "innerforge/conjugation.hpp"
#include "innerforge/inner.hpp"
#include "innerforge/toeplitz.hpp"

namespace innerforge {

/// Inner function Θ and weight ω = e^{-Ω}.
struct MajorantProblem {
  BlaschkeInner theta{1.0, {}};
  SampledFunction omega{{-1.0, 1.0}, {0.0, 0.0}, GrowthClass{GrowthKind::log, 0}};
  /// Evaluation window; defaults to the sample range of Ω.
  std::optional<Interval> window;
};

struct MajorantConfig {
  TailPolicy tail;
  std::optional<double> eps;
  double grid_per_unit = 8.0;
  std::size_t regularity_probes = 10000;
  std::uint64_t seed = 1;
};

/// (sin(δx)/(δx))^(N0+1) with δ = ε/(2(N0+1)).
struct SincCorrection {
  int N0 = 0;
  double eps = 0;
  double delta = 0;
  double operator()(double x) const;
};

SincCorrection sinc_correction(int N0, double eps);

struct MajorantWitness {
  Interval window;
  double poisson_norm = 0;
  double inf_alpha1 = 0;
  double eps = 0;
  std::shared_ptr<const InnerJ> I;  // for α - 2εx
  Weight alpha = Weight::linear();
  std::vector<double> grid;
  std::vector<double> log_m;
  std::vector<double> omega;    // ω = e^{-Ω}
  std::vector<double> f_final;  // normalized, |f_final| <= ω
  std::vector<double> ratio;    // |f_final|/ω
  GrowthFit growth;
  SincCorrection sinc;
  double C_maj = 0;          // sup of the unnormalized ratio
  double nontriviality = 0;  // max ratio after normalization
  double ratio_at_origin = 0;
  double zygmund = 0;
  std::vector<std::string> warnings;
};

/// Hypothesis error when Ω is not Poisson-summable, Ω~ fails the C¹ probe,
/// α' is not positive or α - 2εx fails the regularity check; epsilon error
/// when α' - 2ε is not bounded below by a positive constant.
MajorantWitness majorant_pipeline(const MajorantProblem& problem, const MajorantConfig& config = {});

struct MinorantReport {
  std::size_t points = 0;
  double max_ratio = 0;
  double worst_x = 0;
  double nontriviality = 0;
  double zygmund = 0;
};

/// Recomputes |f| = m·ω·sinc/C_maj from the stored modulus and checks
/// |f| <= ω and the exponent budget; verification error on violation.
MinorantReport verify_minorant(const MajorantWitness& wit);

}  // namespace innerforge

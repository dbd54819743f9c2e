#include "innerforge/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace innerforge {

double SincCorrection::operator()(double x) const {
  const double t = x * delta;
  const double s = t == 0 ? 1.0 : std::sin(t) / t;
  return std::pow(s, N0 + 1);
}

SincCorrection sinc_correction(int N0, double eps) {
  if (N0 < 0) throw Error(ErrorKind::precondition, "N0 must be nonnegative", N0);
  if (!(eps > 0)) throw Error(ErrorKind::precondition, "eps must be positive", eps);
  return {N0, eps, eps / (2.0 * (N0 + 1))};
}

namespace {

std::vector<double> uniform(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
  return v;
}

}  // namespace

MajorantWitness majorant_pipeline(const MajorantProblem& problem, const MajorantConfig& config) {
  problem.theta.validate();
  const SampledFunction& Omega = problem.omega;
  MajorantWitness wit;
  wit.window = problem.window.value_or(Omega.range());
  const Interval win = wit.window;
  if (!win.bounded() || !(win.lo < 0 && win.hi > 0)) throw Error(ErrorKind::window, "window must be bounded around 0");

  // (i) Ω ∈ L¹(P).
  wit.poisson_norm = poisson_norm(Omega);
  if (!std::isfinite(wit.poisson_norm))
    throw Error(ErrorKind::hypothesis, "Omega is not Poisson-summable (growth class " + Omega.growth().str() + ")",
                wit.poisson_norm);

  // Derivative of α = arg Θ + 2Ω~ on a grid wide enough for the tail extension.
  const double span = win.length() * (config.tail.width_factor + 1.5);
  const Interval wide{win.lo - span, win.hi + span};
  std::vector<double> xs = uniform(win.lo, win.hi, static_cast<std::size_t>(std::ceil(win.length() * 4)) + 1);
  for (double x : uniform(wide.lo, wide.hi, 4001))
    if (x < win.lo || x > win.hi) xs.push_back(x);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<double> conj_prime(xs.size()), c2(xs.size());
  bool conj_zero = true;
  for (double v : Omega.values())
    if (v != Omega.values().front()) conj_zero = false;
  if (Omega.growth().kind != GrowthKind::bounded && (Omega.left_tail().b != 0 || Omega.right_tail().b != 0))
    conj_zero = false;
  if (!conj_zero) {
    // Ω~ is only evaluated inside the sample range for unbounded classes.
    const Interval r = Omega.range();
    const bool bounded = Omega.growth().kind == GrowthKind::bounded;
    // Difference step no finer than the knot spacing; the piecewise-linear
    // conjugate has log-type derivative spikes at the knots.
    std::vector<double> gaps;
    for (std::size_t k = 1; k < Omega.x().size(); ++k) gaps.push_back(Omega.x()[k] - Omega.x()[k - 1]);
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    const double knot_step = gaps[gaps.size() / 2];
    parallel_for(xs.size(), [&](std::size_t i) {
      const double x = xs[i];
      const double h = std::max(1e-4 * std::max(1.0, std::abs(x)), knot_step);
      if (!bounded && !(x - h > r.lo && x + h < r.hi)) {
        conj_prime[i] = std::numeric_limits<double>::quiet_NaN();
        return;
      }
      const double fm = Omega.conjugate(x - h);
      const double f0 = Omega.conjugate(x);
      const double fp = Omega.conjugate(x + h);
      conj_prime[i] = (fp - fm) / (2 * h);
      c2[i] = std::abs(fp - 2 * f0 + fm) / h;
    });
    // (ii) C¹ probe inside the window: no derivative jumps at the knot scale.
    double scale = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (std::isfinite(conj_prime[i])) scale = std::max(scale, std::abs(conj_prime[i]));
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (win.contains(xs[i]) && std::isfinite(conj_prime[i]) && c2[i] > 0.25 * scale)
        throw Error(ErrorKind::hypothesis, "conjugate of Omega fails the C1 probe at x = " + std::to_string(xs[i]),
                    c2[i], 0.25 * scale);
    // Outside the sample range of an unbounded class, hold the last derivative.
    std::size_t first = 0;
    while (first < xs.size() && !std::isfinite(conj_prime[first])) ++first;
    std::size_t last = xs.size();
    while (last > 0 && !std::isfinite(conj_prime[last - 1])) --last;
    if (first >= last) throw Error(ErrorKind::window, "no probe inside the Omega sample range");
    for (std::size_t i = 0; i < first; ++i) conj_prime[i] = conj_prime[first];
    for (std::size_t i = last; i < xs.size(); ++i) conj_prime[i] = conj_prime[last - 1];
  }

  const BlaschkeInner& th = problem.theta;
  if (conj_zero && th.zeros.empty()) {
    wit.alpha = Weight::linear(th.a);
  } else {
    std::vector<double> d(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      d[i] = blaschke_arg_prime(th, xs[i]) + (conj_zero ? 0.0 : 2.0 * conj_prime[i]);
      if (!(d[i] > 0))
        throw Error(ErrorKind::hypothesis, "alpha' is not positive at x = " + std::to_string(xs[i]), d[i], 0.0);
    }
    wit.alpha = Weight::sampled(xs, d);
  }
  const Weight& alpha = wit.alpha;

  // ε with α' - 2ε >= inf α'/2.
  wit.inf_alpha1 = std::numeric_limits<double>::infinity();
  for (double x : uniform(win.lo, win.hi, 4001)) wit.inf_alpha1 = std::min(wit.inf_alpha1, alpha.alpha1(x));
  wit.eps = config.eps.value_or(0.25 * wit.inf_alpha1);
  if (!(wit.eps > 0) || !(wit.inf_alpha1 - 2.0 * wit.eps > 0))
    throw Error(ErrorKind::epsilon, "alpha' - 2 eps is not bounded below by a positive constant",
                wit.inf_alpha1 - 2.0 * wit.eps, 0.0);

  const Weight iw = Weight::sum({{1.0, alpha}, {-2.0 * wit.eps, Weight::linear()}});
  const RegularityReport reg = regularity_report(iw, win, config.regularity_probes, 1.0, config.seed);
  if (!reg.pass())
    throw Error(ErrorKind::hypothesis, "alpha - 2 eps x fails the regular locally doubling check", reg.C.value);

  const Interval iwin = widen_window(iw, win, 20.0 * kTwoPi);
  PhaseFunction phase{[&iw](double x) { return iw.alpha(x); }, [&iw](double x) { return iw.alpha1(x); }, iwin, iw};
  PhaseOptions popt;
  popt.seed = config.seed;
  popt.grid_points = 2000;
  wit.I = std::make_shared<const InnerJ>(approximate_phase(iw, phase, config.tail, popt));
  const InnerJ& I = *wit.I;

  // Grid: nodes of I, midpoints, uniform in α.
  std::vector<double> grid;
  for (double x : I.lattice().points())
    if (win.contains(x)) grid.push_back(x);
  for (double x : I.lattice().midpoints())
    if (win.contains(x)) grid.push_back(x);
  const double a0 = iw.alpha(win.lo);
  const double length = iw.length(win);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(length * config.grid_per_unit));
  for (std::size_t i = 0; i <= steps; ++i)
    grid.push_back(std::clamp(iw.inverse(a0 + length * static_cast<double>(i) / steps), win.lo, win.hi));
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> diff(grid.size());
  parallel_for(grid.size(), [&](std::size_t i) { diff[i] = iw.alpha(grid[i]) - I.arg(grid[i]); });
  const SampledFunction part(grid, diff);
  wit.grid = grid;
  wit.log_m = modulus_from_phase({part}).values();
  wit.growth = fit_growth(wit.grid, wit.log_m);

  const int N0 = static_cast<int>(std::ceil(wit.growth.N));
  wit.sinc = sinc_correction(N0, wit.eps);
  if (!(wit.sinc.delta * (N0 + 1) < wit.eps))
    throw Error(ErrorKind::verification, "sinc exponent budget exceeded", wit.sinc.delta * (N0 + 1), wit.eps);

  const std::size_t n = grid.size();
  std::vector<double> raw(n);
  wit.omega.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wit.omega[i] = std::exp(-Omega(grid[i]));
    raw[i] = std::exp(wit.log_m[i]) * std::abs(wit.sinc(grid[i]));
  }
  wit.C_maj = *std::max_element(raw.begin(), raw.end());
  if (!(wit.C_maj > 0) || !std::isfinite(wit.C_maj)) throw Error(ErrorKind::numeric, "minorant normalization failed", wit.C_maj);
  wit.ratio.resize(n);
  wit.f_final.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    wit.ratio[i] = raw[i] / wit.C_maj;
    wit.f_final[i] = wit.ratio[i] * wit.omega[i];
  }
  wit.nontriviality = *std::max_element(wit.ratio.begin(), wit.ratio.end());
  wit.ratio_at_origin = wit.ratio[static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), 0.0) - grid.begin())];

  try {
    wit.zygmund = zygmund_integral(part).total();
    if (!std::isfinite(wit.zygmund)) wit.warnings.push_back("zygmund integral not finite");
  } catch (const Error& e) {
    wit.warnings.push_back(std::string("zygmund diagnostic skipped: ") + e.what());
  }
  return wit;
}

MinorantReport verify_minorant(const MajorantWitness& wit) {
  const std::size_t n = wit.grid.size();
  if (n == 0 || wit.log_m.size() != n || wit.omega.size() != n || wit.f_final.size() != n)
    throw Error(ErrorKind::verification, "incomplete witness");
  if (!(wit.sinc.delta * (wit.sinc.N0 + 1) < wit.eps))
    throw Error(ErrorKind::verification, "sinc exponent budget exceeded", wit.sinc.delta * (wit.sinc.N0 + 1), wit.eps);
  MinorantReport rep;
  rep.points = n;
  rep.zygmund = wit.zygmund;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::exp(wit.log_m[i]) * std::abs(wit.sinc(wit.grid[i])) / wit.C_maj;
    const double stored = wit.f_final[i] / wit.omega[i];
    const double worst = std::max(ratio, stored);
    if (worst > rep.max_ratio) {
      rep.max_ratio = worst;
      rep.worst_x = wit.grid[i];
    }
  }
  if (rep.max_ratio > 1.0 || !(wit.f_final[0] >= 0))
    throw Error(ErrorKind::verification, "|f| exceeds omega at x = " + std::to_string(rep.worst_x), rep.max_ratio, 1.0);
  for (std::size_t i = 0; i < n; ++i)
    if (wit.f_final[i] > wit.omega[i])
      throw Error(ErrorKind::verification, "|f| exceeds omega at x = " + std::to_string(wit.grid[i]),
                  wit.f_final[i] / wit.omega[i], 1.0);
  rep.nontriviality = rep.max_ratio;
  return rep;
}

}  // namespace innerforge

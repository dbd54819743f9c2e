#include "innerforge/toeplitz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace innerforge {

namespace {

std::vector<double> default_r_list(double length) { return {length / 8, length / 4, length / 2}; }

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

double inf_derivative(const Weight& w, Interval win, std::size_t probes) {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes; ++i) {
    const double x = win.lo + win.length() * static_cast<double>(i) / static_cast<double>(probes - 1);
    lo = std::min(lo, w.alpha1(x));
  }
  return lo;
}

}  // namespace

double ZeroSetWitness::m_at(double x) const {
  if (grid.empty() || x < grid.front() || x > grid.back())
    throw Error(ErrorKind::window, "x outside the witness grid", x);
  const auto it = std::lower_bound(grid.begin(), grid.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - grid.begin());
  if (*it == x) return std::exp(log_m[k]);
  const double t = (x - grid[k - 1]) / (grid[k] - grid[k - 1]);
  return std::exp(log_m[k - 1] + t * (log_m[k] - log_m[k - 1]));
}

SampledFunction modulus_from_phase(const std::vector<SampledFunction>& parts) {
  if (parts.empty()) throw Error(ErrorKind::size, "modulus needs at least one phase part");
  const std::vector<double>& x = parts.front().x();
  std::vector<double> total(x.size(), 0.0);
  for (const SampledFunction& p : parts) {
    if (p.growth().kind != GrowthKind::bounded)
      throw Error(ErrorKind::precondition, "phase part with growth class " + p.growth().str() + " is not bounded");
    if (p.x() != x) throw Error(ErrorKind::consistency, "phase parts must share one grid");
    for (std::size_t i = 0; i < x.size(); ++i) total[i] += p.values()[i];
  }
  const SampledFunction sum(x, total);
  std::vector<double> log_m(x.size());
  parallel_for(x.size(), [&](std::size_t i) { log_m[i] = -0.5 * sum.conjugate(x[i]); });
  return SampledFunction(x, std::move(log_m));
}

GrowthFit fit_growth(const std::vector<double>& x, const std::vector<double>& log_m) {
  if (x.size() != log_m.size() || x.empty()) throw Error(ErrorKind::size, "growth fit needs matching samples");
  GrowthFit g;
  std::vector<double> lx(x.size()), ay(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log(bracket(x[i]));
    ay[i] = std::abs(log_m[i]);
  }
  g.slope = ls_slope(lx, ay);
  g.N = std::max(0.0, std::ceil(g.slope - 0.1));
  g.c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) {
    g.C = std::max(g.C, std::exp(log_m[i] - g.N * lx[i]));
    g.c = std::min(g.c, std::exp(log_m[i] + g.N * lx[i]));
  }
  // Absorb the last-bit rounding of the extremal points.
  g.C *= 1 + 1e-12;
  g.c *= 1 - 1e-12;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = std::exp(log_m[i]);
    const double b = std::pow(bracket(x[i]), g.N);
    if (!(g.c / b <= m && m <= g.C * b))
      throw Error(ErrorKind::verification, "growth sandwich fails at x = " + std::to_string(x[i]), m);
  }
  return g;
}

ZeroSetWitness zero_set_pipeline(const Symbol& sym, const Lattice& lattice, const ZeroSetConfig& config) {
  const Weight& alpha = sym.alpha;
  const Interval win = lattice.window();
  if (!win.bounded() || !win.contains(0.0)) throw Error(ErrorKind::window, "pipeline window must be bounded and contain 0");
  if (lattice.empty()) throw Error(ErrorKind::size, "pipeline needs a nonempty lattice");

  ZeroSetWitness wit;
  wit.input = lattice;

  const RegularityReport reg = regularity_report(alpha, win, config.regularity_probes, 1.0, config.seed);
  if (!reg.pass())
    throw Error(ErrorKind::hypothesis, "weight fails the regular locally doubling check", reg.C.value);

  if (sym.h) {
    if (sym.h->growth().kind != GrowthKind::bounded)
      throw Error(ErrorKind::precondition, "perturbation h must be declared bounded");
    for (double v : sym.h->values()) wit.h_sup = std::max(wit.h_sup, std::abs(v));
  }

  // Density gate.
  const double length = alpha.length(win);
  const std::vector<double> r_list = config.r_list.empty() ? default_r_list(length) : config.r_list;
  const DensityReport dens = upper_density(alpha, lattice, r_list);
  wit.upper_density = dens.limit_estimate;
  if (!(wit.upper_density < 1.0 / kTwoPi))
    throw Error(ErrorKind::threshold,
                "upper density is not below 1/2pi; see the necessity certificate for dense lattices",
                wit.upper_density, 1.0 / kTwoPi);

  wit.delta = 0.5 * (1.0 - kTwoPi * wit.upper_density);
  wit.inf_alpha1 = inf_derivative(alpha, win, 4001);
  wit.eps = config.eps.value_or(std::min(0.1, wit.delta * wit.inf_alpha1 / 4.0));
  if (!(wit.eps > 0) || !(wit.delta * wit.inf_alpha1 - 2.0 * wit.eps > 0))
    throw Error(ErrorKind::epsilon, "delta*alpha' - 2*eps is not positive on the window",
                wit.delta * wit.inf_alpha1 - 2.0 * wit.eps, 0.0);

  // Regularization with the smallest block length from the ladder that works.
  double sep_min = 0;
  if (config.sep_min) {
    sep_min = *config.sep_min;
  } else {
    const double own = lattice.size() >= 2 ? separation_stats(alpha, lattice).delta_sep : kTwoPi;
    sep_min = 0.5 * std::min(own, kTwoPi);
  }
  std::optional<RegularizationResult> regres;
  for (double N0 = 10; N0 <= length; N0 *= 2) {
    try {
      regres = regularize(alpha, lattice, wit.delta, N0, sep_min);
      wit.N0 = N0;
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::threshold) throw;
    }
  }
  if (!regres)
    throw Error(ErrorKind::threshold, "no block length up to the window alpha-length satisfies the density precondition");
  wit.regularization = std::move(*regres);
  const Lattice& reg_lattice = wit.regularization.lattice;

  wit.J = std::make_shared<const InnerJ>(InnerJ::build(alpha, reg_lattice, config.tail));
  const Weight iw = Weight::sum({{wit.delta, alpha}, {-2.0 * wit.eps, Weight::linear()}});
  // I only has to track its phase on win; the wider window gives it enough nodes.
  const Interval iwin = widen_window(iw, win, 20.0 * kTwoPi);
  PhaseFunction iphase{[&iw](double x) { return iw.alpha(x); }, [&iw](double x) { return iw.alpha1(x); }, iwin, iw};
  PhaseOptions popt;
  popt.seed = config.seed;
  popt.grid_points = 2000;
  wit.I = std::make_shared<const InnerJ>(approximate_phase(iw, iphase, config.tail, popt));

  // Grid: nodes, midpoints, uniform in α.
  std::vector<double> grid(reg_lattice.points());
  for (double m : reg_lattice.midpoints()) grid.push_back(m);
  const double a0 = alpha.alpha(win.lo);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(length * config.grid_per_unit));
  for (std::size_t i = 0; i <= steps; ++i)
    grid.push_back(std::clamp(alpha.inverse(a0 + length * static_cast<double>(i) / steps), win.lo, win.hi));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> phase(grid.size()), h_conj(grid.size(), 0.0);
  const InnerJ& J = *wit.J;
  const InnerJ& I = *wit.I;
  parallel_for(grid.size(), [&](std::size_t i) {
    const double x = grid[i];
    const double a = alpha.alpha(x);
    phase[i] = ((1.0 - wit.delta) * a - J.arg(x)) + (wit.delta * a - 2.0 * wit.eps * x - I.arg(x));
    if (sym.h) h_conj[i] = sym.h->conjugate(x);
  });
  const SampledFunction parts(grid, phase);
  const SampledFunction lm = modulus_from_phase({parts});
  wit.grid = grid;
  wit.log_m = lm.values();
  for (std::size_t i = 0; i < grid.size(); ++i) wit.log_m[i] -= 0.5 * h_conj[i];
  wit.growth = fit_growth(wit.grid, wit.log_m);

  // Per-node residuals on Λ'.
  const auto& orig = lattice.points();
  wit.residuals.resize(reg_lattice.size());
  parallel_for(reg_lattice.size(), [&](std::size_t n) {
    NodeResidual r;
    r.lambda = reg_lattice[n];
    r.original = std::binary_search(orig.begin(), orig.end(), r.lambda);
    r.m = wit.m_at(r.lambda);
    r.abs_T = std::abs(1.0 - J.eval(r.lambda)) * r.m;
    r.abs_Tprime = J.jprime_at_lambda(n) * r.m;
    r.floor_value = r.abs_Tprime * std::pow(bracket(r.lambda), wit.growth.N);
    wit.residuals[n] = r;
  });
  wit.derivative_floor = std::numeric_limits<double>::infinity();
  for (const NodeResidual& r : wit.residuals) wit.derivative_floor = std::min(wit.derivative_floor, r.floor_value);

  // Conditioning diagnostic.
  std::vector<double> total(phase);
  for (std::size_t i = 0; i < total.size(); ++i) total[i] += sym.h ? (*sym.h)(grid[i]) : 0.0;
  try {
    wit.zygmund = zygmund_integral(SampledFunction(grid, total)).total();
    if (!std::isfinite(wit.zygmund)) wit.warnings.push_back("zygmund integral not finite");
  } catch (const Error& e) {
    wit.warnings.push_back(std::string("zygmund diagnostic skipped: ") + e.what());
  }
  return wit;
}

NecessityCertificate necessity_certificate(const Weight& w, const Lattice& lattice, double delta, double N0) {
  const Interval win = lattice.window();
  if (!win.bounded() || !win.contains(0.0)) throw Error(ErrorKind::window, "window must be bounded and contain 0");
  if (!(delta > 0)) throw Error(ErrorKind::precondition, "delta must be positive", delta);
  if (!(N0 > 0)) throw Error(ErrorKind::precondition, "block length must be positive", N0);
  if (lattice.empty()) throw Error(ErrorKind::not_applicable, "empty lattice has density 0");

  NecessityCertificate cert;
  cert.delta = delta;
  cert.N0 = N0;
  const double length = w.length(win);
  const std::vector<double> r_list = default_r_list(length);
  cert.lower_density = lower_density(w, lattice, r_list).limit_estimate;
  const double need = (1.0 + delta) / kTwoPi;
  if (!(cert.lower_density > need))
    throw Error(ErrorKind::not_applicable, "lower density does not exceed (1+delta)/2pi", cert.lower_density, need);

  const double top = w.alpha(win.hi);
  long prev = 0;
  std::vector<double> xs, ys;
  for (double a = N0; a <= top; a += N0) {
    NecessityRow row;
    row.a = a;
    row.count = counting_function(lattice, w.inverse(a));
    row.block_count = row.count - prev;
    row.block_pass = kTwoPi * static_cast<double>(row.block_count) > (1.0 + delta) * N0;
    row.value = kTwoPi * static_cast<double>(row.count) - a;
    prev = row.count;
    if (!(row.value > delta * a))
      throw Error(ErrorKind::verification, "telescoped value fails at alpha = " + std::to_string(a), row.value, delta * a);
    xs.push_back(a);
    ys.push_back(row.value);
    cert.rows.push_back(row);
  }
  if (cert.rows.empty()) throw Error(ErrorKind::window, "window shorter than one block", top, N0);
  cert.slope = xs.size() >= 2 ? ls_slope(xs, ys) : ys.front() / xs.front();
  return cert;
}

TValue eval_T(const ZeroSetWitness& wit, double x) {
  TValue out;
  const Lattice& lat = wit.regularization.lattice;
  const auto& pts = lat.points();
  const auto it = std::lower_bound(pts.begin(), pts.end(), x);
  if (it != pts.end() && *it == x) {
    const std::size_t n = static_cast<std::size_t>(it - pts.begin());
    char buf[96];
    std::snprintf(buf, sizeof buf, "node; |T'| = |J'|m = %.12g", wit.J->jprime_at_lambda(n) * wit.m_at(x));
    out.abs_T = std::abs(1.0 - wit.J->eval(x)) * wit.m_at(x);
    out.note = buf;
    return out;
  }
  out.abs_T = std::abs(1.0 - wit.J->eval(x)) * wit.m_at(x);
  return out;
}

}  // namespace innerforge

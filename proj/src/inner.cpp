#include "innerforge/inner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace innerforge {

namespace {

// atan(e^s) without overflow.
double atan_exp(double s) { return s > 0 ? 0.5 * kPi - std::atan(std::exp(-s)) : std::atan(std::exp(s)); }

double log_dist(double a, double b) { return std::log(std::abs(a - b)); }

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

}  // namespace

InnerJ::InnerJ(Weight w, Lattice lattice, HalfIndicator u, TailPolicy tail)
    : weight_(std::move(w)), lattice_(std::move(lattice)), u_(std::move(u)), tail_(tail) {}

InnerJ InnerJ::build(const Weight& w, const Lattice& lattice, const TailPolicy& tail) {
  if (lattice.size() < 3) throw Error(ErrorKind::size, "inner function needs at least three lattice points",
                                      static_cast<double>(lattice.size()), 3.0);
  separation_stats(w, lattice);
  HalfIndicator u = HalfIndicator::build(w, lattice, tail);
  if (!std::isfinite(u.tail_bound())) throw Error(ErrorKind::tail, "tail bound is not finite");
  InnerJ J(w, lattice, std::move(u), tail);

  const auto& lam = J.u_.nodes();
  const auto& mid = J.u_.mids();
  const std::size_t gaps = mid.size();

  // C★ from the two exponents at z = i.
  const Complex i{0.0, 1.0};
  Complex K = -i * (0.5 * kPi);
  for (std::size_t k = 0; k < gaps; ++k) K += std::log(mid[k] - i) - std::log(lam[k] - i);
  const Complex F = i * kPi * schwartz_upper(J.u_, i);
  const Complex diff = K - F;
  if (std::abs(diff.imag()) > 1e-8 * std::max(1.0, std::abs(diff.real())))
    throw Error(ErrorKind::consistency, "exponents disagree in phase at z = i", diff.imag(), 0.0);
  J.log_cstar_ = diff.real();
  J.origin_ = J.u_.window_first() + lattice.origin();

  J.sigma_one_.assign(gaps, 0.0);
  J.sigma_minus_.assign(gaps, 0.0);
  parallel_for(gaps, [&](std::size_t k) {
    J.sigma_one_[k] = kPi * std::exp(J.log_residue_lambda(k));
    J.sigma_minus_[k] = kPi * std::exp(J.log_residue_omega(k));
  });
  for (std::size_t k = 0; k < gaps; ++k)
    if (!(J.sigma_one_[k] > 0) || !std::isfinite(J.sigma_one_[k]) || !(J.sigma_minus_[k] > 0) ||
        !std::isfinite(J.sigma_minus_[k]))
      throw Error(ErrorKind::numeric, "Clark mass out of range at node " + std::to_string(k));
  return J;
}

// log|Res_{ω_k} e^{-F}| = log C★ + log A_k + log δ_k + log E_k.
double InnerJ::log_residue_omega(std::size_t k) const {
  const auto& lam = u_.nodes();
  const auto& mid = u_.mids();
  const double w = mid[k];
  double logA = 0;
  for (std::size_t j = 0; j < mid.size(); ++j) {
    if (j == k) continue;
    logA += 0.5 * log_dist(lam[j], w) + 0.5 * log_dist(lam[j + 1], w) - log_dist(mid[j], w);
  }
  const double log_half_gap = std::log(0.5 * (lam[k + 1] - lam[k]));
  const double log_end = 0.5 * log_dist(lam.front(), w) - 0.5 * log_dist(lam.back(), w);
  return log_cstar_ + logA + log_half_gap + log_end;
}

// log|Res_{λ_k} e^{F}|, grouped gap by gap.
double InnerJ::log_residue_lambda(std::size_t k) const {
  const auto& lam = u_.nodes();
  const auto& mid = u_.mids();
  const double w = lam[k];
  double acc = -log_cstar_;
  for (std::size_t j = 0; j < mid.size(); ++j) {
    if (j == k || j + 1 == k) continue;
    acc += log_dist(mid[j], w) - 0.5 * log_dist(lam[j], w) - 0.5 * log_dist(lam[j + 1], w);
  }
  acc += log_dist(mid[k], w) - 0.5 * log_dist(lam[k + 1], w);
  if (k > 0) {
    acc += log_dist(mid[k - 1], w) - 0.5 * log_dist(lam[k - 1], w);
    acc -= 0.5 * log_dist(lam.front(), w);
  }
  acc += 0.5 * log_dist(lam.back(), w);
  return acc;
}

double InnerJ::log_A(std::size_t n) const {
  if (n + 1 >= lattice_.size()) throw Error(ErrorKind::window, "midpoint index out of range", static_cast<double>(n));
  const std::size_t k = ext(n);
  const auto& lam = u_.nodes();
  const auto& mid = u_.mids();
  const double w = mid[k];
  double logA = 0;
  for (std::size_t j = 0; j < mid.size(); ++j) {
    if (j == k) continue;
    logA += 0.5 * log_dist(lam[j], w) + 0.5 * log_dist(lam[j + 1], w) - log_dist(mid[j], w);
  }
  return logA;
}

double InnerJ::jprime_at_omega(std::size_t n) const {
  if (n + 1 >= lattice_.size()) throw Error(ErrorKind::window, "midpoint index out of range", static_cast<double>(n));
  return 2.0 * std::exp(-log_residue_omega(ext(n)));
}

double InnerJ::jprime_at_lambda(std::size_t n) const {
  if (n >= lattice_.size()) throw Error(ErrorKind::window, "node index out of range", static_cast<double>(n));
  return 2.0 * std::exp(-log_residue_lambda(ext(n)));
}

double InnerJ::sigma_one(std::size_t n) const {
  if (n >= lattice_.size()) throw Error(ErrorKind::window, "node index out of range", static_cast<double>(n));
  return sigma_one_[ext(n)];
}

double InnerJ::sigma_minus_one(std::size_t n) const {
  if (n + 1 >= lattice_.size()) throw Error(ErrorKind::window, "midpoint index out of range", static_cast<double>(n));
  return sigma_minus_[ext(n)];
}

double InnerJ::conj_u(double x) const { return hilbert_piecewise(u_, x); }

namespace {

struct Locus {
  long k = -1;          // largest J-node index <= x, -1 left of all
  bool at_node = false;
  bool at_mid = false;
  bool before_mid = false;  // x in (λ_k, ω_k)
};

Locus locate(const HalfIndicator& u, double x) {
  const auto& lam = u.nodes();
  const auto& mid = u.mids();
  Locus l;
  const long last = static_cast<long>(mid.size()) - 1;
  l.k = std::min(static_cast<long>(std::upper_bound(lam.begin(), lam.end(), x) - lam.begin()) - 1, last);
  if (l.k >= 0) {
    const std::size_t k = static_cast<std::size_t>(l.k);
    l.at_node = x == lam[k];
    l.at_mid = x == mid[k];
    l.before_mid = x < mid[k];
  }
  return l;
}

}  // namespace

double InnerJ::arg(double x) const {
  if (!std::isfinite(x)) throw Error(ErrorKind::window, "non-finite evaluation point");
  const Locus l = locate(u_, x);
  const double turn = kTwoPi * static_cast<double>(l.k - static_cast<long>(origin_));
  if (l.at_node) return turn;
  if (l.at_mid) return turn + kPi;
  const double s = kPi * conj_u(x);
  if (l.k >= 0 && l.before_mid) return turn + 2.0 * atan_exp(s);
  return turn + kPi + 2.0 * atan_exp(-s);
}

std::complex<double> InnerJ::eval(double x) const {
  if (!std::isfinite(x)) throw Error(ErrorKind::window, "non-finite evaluation point");
  const Locus l = locate(u_, x);
  if (l.at_node) return {1.0, 0.0};
  if (l.at_mid) return {-1.0, 0.0};
  const double s = kPi * conj_u(x);
  const double phase = (l.k >= 0 && l.before_mid) ? 2.0 * atan_exp(s) : kPi + 2.0 * atan_exp(-s);
  return std::polar(1.0, phase);
}

double InnerJ::jprime_series(double x, bool sigma_one) const {
  const Locus l = locate(u_, x);
  if (l.at_node || l.at_mid)
    throw Error(ErrorKind::redirect, "x is a node; use jprime_at_lambda / jprime_at_omega", x);
  const double phase = std::arg(eval(x));
  const auto& pts = sigma_one ? u_.nodes() : u_.mids();
  const auto& mass = sigma_one ? sigma_one_ : sigma_minus_;
  double sum = 0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = x - pts[k];
    sum += mass[k] / (d * d);
  }
  const double half = sigma_one ? std::sin(0.5 * phase) : std::cos(0.5 * phase);
  // 2|J'| = |1 ∓ J|² (1/π) Σ σ/(x - t)², |1 ∓ J|² = 4 half².
  return 2.0 * half * half * sum / kPi;
}

double InnerJ::jprime(double x) const {
  const Locus l = locate(u_, x);
  if (l.at_node || l.at_mid)
    throw Error(ErrorKind::redirect, "x is a node; use jprime_at_lambda / jprime_at_omega", x);
  const auto& lam = u_.nodes();
  const auto& mid = u_.mids();
  const std::size_t last = mid.size() - 1;
  bool use_sigma_one;
  if (l.k >= 0 && (static_cast<std::size_t>(l.k) < last || x < lam[last + 1])) {
    const std::size_t k = static_cast<std::size_t>(l.k);
    const double t = (x - lam[k]) / (lam[k + 1] - lam[k]);
    use_sigma_one = t >= 1.0 / 3.0 && t <= 2.0 / 3.0;
  } else {
    // Outside the node range: series of the nearest point type.
    const double dl = l.k < 0 ? lam.front() - x : std::abs(x - lam[last]);
    const double dm = l.k < 0 ? mid.front() - x : std::abs(x - mid[last]);
    use_sigma_one = dm < dl;
  }
  return jprime_series(x, use_sigma_one);
}

// ---------------------------------------------------------------------------

Interval widen_window(const Weight& w, Interval win, double min_length) {
  const Interval limit = w.window();
  while (w.length(win) < min_length) {
    const Interval next{std::max(limit.lo, 2.0 * win.lo), std::min(limit.hi, 2.0 * win.hi)};
    if (next.lo == win.lo && next.hi == win.hi) break;
    win = next;
  }
  return win;
}

InnerJ approximate_phase(const Weight& w, const PhaseFunction& f, const TailPolicy& tail, const PhaseOptions& options) {
  const Interval win = f.window;
  if (!win.bounded() || !(win.lo < win.hi)) throw Error(ErrorKind::window, "phase window must be bounded");
  if (!f.f) throw Error(ErrorKind::precondition, "phase function has no evaluator");

  PhaseCertificate cert;
  cert.forced = options.force;
  cert.ratio_min = std::numeric_limits<double>::infinity();
  SeededRng rng(options.seed);
  for (std::size_t i = 0; i < options.probes; ++i) {
    const double x = win.lo + win.length() * (static_cast<double>(i) + rng.uniform()) / options.probes;
    double d;
    if (f.fprime) {
      d = f.fprime(x);
    } else {
      const double h = 1e-6 * std::max(1.0, std::abs(x));
      d = (f.f(x + h) - f.f(x - h)) / (2 * h);
    }
    const double r = d / w.alpha1(x);
    cert.ratio_min = std::min(cert.ratio_min, r);
    cert.ratio_max = std::max(cert.ratio_max, r);
  }
  const double spread = cert.ratio_min > 0 ? cert.ratio_max / cert.ratio_min : std::numeric_limits<double>::infinity();
  cert.hypothesis_pass = cert.ratio_min > 0 && spread <= options.ratio_band;
  if (!cert.hypothesis_pass && !options.force)
    throw Error(ErrorKind::hypothesis, "f'/alpha' spread exceeds the comparability band", spread, options.ratio_band);

  InnerJ J = InnerJ::build(w, level_set(f, win, options.root_tol), tail);

  const std::size_t G = std::max<std::size_t>(options.grid_points, 2);
  std::vector<double> xs(G), args(G), diff(G);
  for (std::size_t i = 0; i < G; ++i)
    xs[i] = i + 1 == G ? win.hi : win.lo + win.length() * static_cast<double>(i) / static_cast<double>(G - 1);
  parallel_for(G, [&](std::size_t i) {
    args[i] = J.arg(xs[i]);
    diff[i] = f.f(xs[i]) - args[i];
  });
  for (std::size_t i = 1; i < G; ++i)
    if (!(args[i] > args[i - 1])) cert.monotone = false;
  const auto [lo, hi] = std::minmax_element(diff.begin(), diff.end());
  cert.grid_points = G;
  cert.constant = 0.5 * (*lo + *hi);
  cert.sup_error = 0.5 * (*hi - *lo);
  cert.tail_budget = kPi * J.tail_bound();
  J.set_certificate(cert);
  return J;
}

DerivativeCertificate fit_derivative_certificate(const InnerJ& J, std::size_t grid_points) {
  const Lattice& lat = J.lattice();
  const Weight& w = J.weight();
  const Interval win{lat.points().front(), lat.points().back()};
  DerivativeCertificate c;

  std::vector<double> xs;
  for (std::size_t i = 0; i < grid_points; ++i) {
    // Offset by half a cell so that grid points avoid the nodes.
    const double x = win.lo + win.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(grid_points);
    xs.push_back(x);
  }
  std::vector<double> L(xs.size()), Y(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    L[i] = std::log(bracket(xs[i]) * bracket(w.alpha1(xs[i])));
    Y[i] = std::log(J.jprime(xs[i]));
  });
  const std::size_t n = lat.size();
  std::vector<double> Ln(n), Yn(n);
  parallel_for(n, [&](std::size_t i) {
    Ln[i] = std::log(bracket(lat[i]) * w.alpha1(lat[i]));
    Yn[i] = -std::log(J.jprime_at_lambda(i));
  });
  c.slope_upper = ls_slope(L, Y);
  c.slope_lower = ls_slope(Ln, Yn);
  // Round the measured exponent up; slopes less than 0.1 above an integer
  // count as that integer.
  c.N0 = std::max(0, static_cast<int>(std::ceil(std::max(c.slope_upper, c.slope_lower) - 0.1)));
  for (std::size_t i = 0; i < xs.size(); ++i) c.C_upper = std::max(c.C_upper, std::exp(Y[i] - c.N0 * L[i]));
  for (std::size_t i = 0; i < n; ++i) c.C_lower = std::max(c.C_lower, std::exp(Yn[i] - c.N0 * Ln[i]));
  c.grid_points = xs.size();
  c.nodes = n;
  return c;
}

// ---------------------------------------------------------------------------

void BlaschkeInner::validate() const {
  if (!(a >= 0) || !std::isfinite(a)) throw Error(ErrorKind::domain, "singular type a must be >= 0", a);
  for (const auto& z : zeros)
    if (!(z.imag() > 0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw Error(ErrorKind::domain, "Blaschke zeros must lie in the upper half-plane", z.imag(), 0.0);
  if (a == 0 && zeros.empty()) throw Error(ErrorKind::degenerate, "inner function is constant");
}

double blaschke_arg_prime(const BlaschkeInner& B, double x) {
  double acc = B.a;
  for (const auto& z : B.zeros) {
    const double d = x - z.real();
    acc += 2.0 * z.imag() / (d * d + z.imag() * z.imag());
  }
  return acc;
}

double blaschke_arg(const BlaschkeInner& B, double x) {
  double acc = B.a * x;
  for (const auto& z : B.zeros)
    acc += 2.0 * (std::atan((x - z.real()) / z.imag()) + std::atan(z.real() / z.imag()));
  return acc;
}

}  // namespace innerforge

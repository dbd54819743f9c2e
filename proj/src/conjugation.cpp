#include "innerforge/conjugation.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <cmath>
#include <numeric>

namespace innerforge {

namespace {

using boost::math::quadrature::gauss;
using boost::math::quadrature::gauss_kronrod;

constexpr double kInf = std::numeric_limits<double>::infinity();

// log|x - t| with the 0·log 0 = 0 convention handled by callers.
double log_abs(double v) { return std::log(std::abs(v)); }

// (x - t)·log|x - t|, continuous at t = x.
double xlogx(double d) { return d == 0 ? 0.0 : d * std::log(std::abs(d)); }

struct Quad {
  double value = 0;
  double error = 0;
};

Quad gk(const std::function<double(double)>& f, double a, double b) {
  Quad q;
  if (!(b > a)) return q;
  double err = 0;
  q.value = gauss_kronrod<double, 31>::integrate(f, a, b, 4, 1e-11, &err);
  q.error = std::abs(err);
  return q;
}

// Integral over (a, ∞) via exp_sinh.
Quad ray(const std::function<double(double)>& f, double a) {
  thread_local boost::math::quadrature::exp_sinh<double> integrator;
  Quad q;
  double err = 0;
  double l1 = 0;
  q.value = integrator.integrate([&](double tau) { return f(a + tau); }, 0.0, kInf, 1e-12, &err, &l1);
  q.error = std::abs(err);
  return q;
}

// Regularized conjugate of c·1_[L, ∞) at x, times π.
double right_ray_const(double c, double L, double x) {
  return c == 0 ? 0.0 : c * (log_abs(L - x) - 0.5 * std::log1p(L * L));
}

// Regularized conjugate of c·1_(-∞, a] at x, times π.
double left_ray_const(double c, double a, double x) {
  return c == 0 ? 0.0 : c * (-log_abs(a - x) + 0.5 * std::log1p(a * a));
}

// Kernel (1/(x - t) + t/(1 + t²)).
double conj_kernel(double x, double t) { return 1.0 / (x - t) + t / (1.0 + t * t); }

}  // namespace

// ---------------------------------------------------------------------------
// GrowthClass

GrowthClass GrowthClass::parse(std::string_view text) {
  if (text == "bounded") return {GrowthKind::bounded, 0};
  if (text == "log") return {GrowthKind::log, 0};
  if (text.substr(0, 5) == "poly:") {
    const std::string_view num = text.substr(5);
    double K = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), K);
    if (ec == std::errc() && ptr == num.data() + num.size() && std::isfinite(K)) return {GrowthKind::poly, K};
  }
  throw Error(ErrorKind::usage, "growth class must be bounded, log or poly:K, got '" + std::string(text) + "'");
}

std::string GrowthClass::str() const {
  switch (kind) {
    case GrowthKind::bounded: return "bounded";
    case GrowthKind::log: return "log";
    case GrowthKind::poly: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "poly:%g", K);
      return buf;
    }
  }
  return "bounded";
}

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(std::vector<double> x, std::vector<double> values, GrowthClass growth)
    : x_(std::move(x)), v_(std::move(values)), growth_(growth) {
  if (x_.size() != v_.size()) throw Error(ErrorKind::size, "abscissae and values differ in length");
  if (x_.size() < 2) throw Error(ErrorKind::size, "sampled function needs at least two samples");
  for (std::size_t i = 0; i < x_.size(); ++i) {
    if (!std::isfinite(x_[i]) || !std::isfinite(v_[i])) throw Error(ErrorKind::numeric, "non-finite sample");
    if (i > 0 && !(x_[i] > x_[i - 1]))
      throw Error(ErrorKind::monotonicity, "abscissae must be strictly increasing", x_[i]);
  }
  const std::size_t n = x_.size() - 1;
  auto fit = [&](std::size_t outer, std::size_t inner) {
    Tail t{v_[outer], 0};
    if (growth_.kind == GrowthKind::bounded) return t;
    const double g0 = growth_profile(x_[outer]);
    const double g1 = growth_profile(x_[inner]);
    if (g0 != g1) t.b = (v_[outer] - v_[inner]) / (g0 - g1);
    t.a = v_[outer] - t.b * g0;
    return t;
  };
  left_ = fit(0, 1);
  right_ = fit(n, n - 1);

  // Knot form of the conjugate with constant continuation.
  slope_jump_.assign(n + 1, 0.0);
  double prev_slope = 0;
  double reg = 0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double slope = k < n ? (v_[k + 1] - v_[k]) / (x_[k + 1] - x_[k]) : 0.0;
    slope_jump_[k] = slope - prev_slope;
    prev_slope = slope;
    if (k < n) {
      const double p = x_[k];
      const double q = x_[k + 1];
      const double intercept = v_[k] - slope * p;
      reg += intercept * 0.5 * (std::log1p(q * q) - std::log1p(p * p)) +
             slope * ((q - p) - (std::atan(q) - std::atan(p)));
    }
  }
  constant_ = -(v_[n] - v_[0]) + reg - 0.5 * v_[n] * std::log1p(x_[n] * x_[n]) +
              0.5 * v_[0] * std::log1p(x_[0] * x_[0]);
}

double SampledFunction::growth_profile(double t) const {
  switch (growth_.kind) {
    case GrowthKind::bounded: return 1.0;
    case GrowthKind::log: return std::log(bracket(t));
    case GrowthKind::poly: return std::pow(bracket(t), growth_.K);
  }
  return 1.0;
}

double SampledFunction::operator()(double t) const {
  if (t <= x_.front()) return t == x_.front() ? v_.front() : left_.a + left_.b * growth_profile(t);
  if (t >= x_.back()) return t == x_.back() ? v_.back() : right_.a + right_.b * growth_profile(t);
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double tau = (t - x_[k]) / (x_[k + 1] - x_[k]);
  return v_[k] + tau * (v_[k + 1] - v_[k]);
}

namespace {

// π × conjugate contribution of the non-constant part of the class tails.
Quad growth_tails(const SampledFunction& s, double x) {
  Quad q;
  const GrowthClass& g = s.growth();
  if (g.kind == GrowthKind::bounded) return q;
  const auto L = s.left_tail();
  const auto R = s.right_tail();
  if (L.b == 0 && R.b == 0) return q;
  if (g.kind == GrowthKind::poly && g.K >= 1)
    throw Error(ErrorKind::tail, "conjugate of a poly:K tail with K >= 1 diverges", g.K, 1.0);
  const Interval r = s.range();
  if (!(x > r.lo && x < r.hi)) throw Error(ErrorKind::domain, "x must lie inside the sample range", x);
  if (R.b != 0) {
    const double g0 = s.growth_profile(r.hi);
    const Quad part = ray([&](double t) { return R.b * (s.growth_profile(t) - g0) * conj_kernel(x, t); }, r.hi);
    q.value += part.value;
    q.error += part.error;
  }
  if (L.b != 0) {
    const double g0 = s.growth_profile(r.lo);
    const Quad part = ray(
        [&](double tau) {
          const double t = r.lo - tau;
          return L.b * (s.growth_profile(t) - g0) * conj_kernel(x, t);
        },
        0.0);
    q.value += part.value;
    q.error += part.error;
  }
  return q;
}

}  // namespace

double SampledFunction::conjugate(double t) const {
  double acc = constant_;
  for (std::size_t k = 0; k < x_.size(); ++k)
    if (slope_jump_[k] != 0) acc += slope_jump_[k] * xlogx(t - x_[k]);
  acc += growth_tails(*this, t).value;
  return acc / kPi;
}

// ---------------------------------------------------------------------------
// PiecewiseConstant

PiecewiseConstant::PiecewiseConstant(std::vector<Piece> pieces, double background)
    : pieces_(std::move(pieces)), background_(background) {
  std::sort(pieces_.begin(), pieces_.end(), [](const Piece& a, const Piece& b) { return a.a < b.a; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const Piece& p = pieces_[i];
    if (!std::isfinite(p.a) || !std::isfinite(p.b) || !std::isfinite(p.value))
      throw Error(ErrorKind::numeric, "non-finite piece");
    if (!(p.b > p.a)) throw Error(ErrorKind::monotonicity, "piece endpoints out of order", p.a);
    if (i > 0 && p.a < pieces_[i - 1].b) throw Error(ErrorKind::consistency, "pieces overlap", p.a);
  }
}

double PiecewiseConstant::operator()(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t, [](double v, const Piece& p) { return v < p.a; });
  if (it == pieces_.begin()) return background_;
  --it;
  return (t > it->a && t < it->b) ? background_ + it->value : background_;
}

std::vector<double> PiecewiseConstant::breakpoints() const {
  std::vector<double> out;
  for (const Piece& p : pieces_) {
    if (out.empty() || out.back() != p.a) out.push_back(p.a);
    out.push_back(p.b);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tail policy and the half indicator

TailMode TailPolicy::parse_mode(std::string_view text) {
  if (text == "alpha_regular" || text == "alpha-regular") return TailMode::alpha_regular;
  if (text == "zero") return TailMode::zero;
  throw Error(ErrorKind::usage, "tail mode must be alpha_regular or zero, got '" + std::string(text) + "'");
}

std::string_view to_string(TailMode mode) { return mode == TailMode::zero ? "zero" : "alpha_regular"; }

HalfIndicator::HalfIndicator(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw Error(ErrorKind::size, "half indicator needs at least two nodes");
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw Error(ErrorKind::monotonicity, "nodes must be strictly increasing");
  mids_.resize(nodes_.size() - 1);
  gap_const_.resize(nodes_.size() - 1);
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    mids_[k] = 0.5 * (nodes_[k] + nodes_[k + 1]);
    gap_const_[k] = (std::log1p(mids_[k] * mids_[k]) - std::log1p(nodes_[k] * nodes_[k])) / kTwoPi;
  }
  first_ = 0;
  last_ = nodes_.size() - 1;
}

HalfIndicator HalfIndicator::build(const Weight& w, const Lattice& lattice, const TailPolicy& tail) {
  if (lattice.size() < 2) throw Error(ErrorKind::size, "lattice needs at least two points");
  if (!(tail.width_factor >= 0)) throw Error(ErrorKind::tail, "extension width must be nonnegative");
  const Interval win = lattice.window();
  if (!win.bounded()) throw Error(ErrorKind::window, "lattice window must be bounded");
  const std::vector<double>& pts = lattice.points();
  const std::size_t n = pts.size();

  auto mean_gap = [&](bool right) {
    const std::size_t k = std::min<std::size_t>(5, n - 1);
    return right ? (w.alpha(pts[n - 1]) - w.alpha(pts[n - 1 - k])) / static_cast<double>(k)
                 : (w.alpha(pts[k]) - w.alpha(pts[0])) / static_cast<double>(k);
  };
  const double gl = mean_gap(false);
  const double gr = mean_gap(true);
  const double length = w.length(win);

  std::vector<double> left_ext, right_ext;
  if (tail.mode == TailMode::alpha_regular && tail.width_factor > 0) {
    const Interval wwin = w.window();
    auto extend = [&](double start, double step, double limit, std::vector<double>& out) {
      for (double a = start + step; step > 0 ? a <= limit : a >= limit; a += step) {
        double x;
        try {
          x = w.inverse(a);
        } catch (const Error&) {
          break;
        }
        if (!wwin.contains(x)) break;
        out.push_back(x);
      }
    };
    extend(w.alpha(pts[n - 1]), gr, w.alpha(win.hi) + tail.width_factor * length, right_ext);
    extend(w.alpha(pts[0]), -gl, w.alpha(win.lo) - tail.width_factor * length, left_ext);
  }
  // The last node only closes the final gap, so one node past the window is
  // always needed for every lattice point to be a jump of u.
  if (right_ext.empty()) {
    double x = kInf;
    try {
      x = w.inverse(w.alpha(pts[n - 1]) + gr);
    } catch (const Error&) {
    }
    if (!std::isfinite(x) || !(x > pts[n - 1]))
      throw Error(ErrorKind::tail, "cannot place a closing node past the weight window");
    right_ext.push_back(x);
  }
  std::vector<double> nodes(left_ext.rbegin(), left_ext.rend());
  const std::size_t first = nodes.size();
  nodes.insert(nodes.end(), pts.begin(), pts.end());
  const std::size_t last = nodes.size() - 1;
  nodes.insert(nodes.end(), right_ext.begin(), right_ext.end());
  // Guard against an extension node colliding with the last lattice point.
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  HalfIndicator u(std::move(nodes));
  u.first_ = first;
  u.last_ = last;
  u.step_ = tail.mode == TailMode::zero ? 0.0 : 0.5 * (gl + gr);

  // Truncation estimate: the ±1/2 oscillation beyond each end E has mean 0,
  // replaced by -1/2; bound both the drift and the dipole remainder.
  const double EL = u.nodes_.front();
  const double ER = u.nodes_.back();
  auto side = [&](double E, double g, double x) {
    const double d = std::abs(E - x);
    if (d == 0) return kInf;
    const double drift = std::abs(std::log(d) - 0.5 * std::log1p(E * E)) / kTwoPi;
    return drift + g / (kPi * w.alpha1(E) * d);
  };
  for (double x : {win.lo, win.hi})
    u.tail_bound_ = std::max(u.tail_bound_, side(EL, gl, x) + side(ER, gr, x));
  return u;
}

double HalfIndicator::operator()(double t) const {
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  if (it == nodes_.begin() || it == nodes_.end()) return -0.5;
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return (t > nodes_[k] && t < mids_[k]) ? 0.5 : -0.5;
}

PiecewiseConstant HalfIndicator::piecewise() const {
  std::vector<Piece> pieces;
  pieces.reserve(mids_.size());
  for (std::size_t k = 0; k < mids_.size(); ++k) pieces.push_back({nodes_[k], mids_[k], 1.0});
  return PiecewiseConstant(std::move(pieces), -0.5);
}

// ---------------------------------------------------------------------------
// Closed-form conjugates

double hilbert_piecewise(const HalfIndicator& u, double x) {
  const auto& lam = u.nodes();
  const auto& mid = u.mids();
  const auto& c = u.gap_constants();
  const std::size_t gaps = mid.size();
  auto term = [&](std::size_t k) {
    const double dl = x - lam[k];
    const double dm = x - mid[k];
    if (dl == 0 || dm == 0) throw Error(ErrorKind::singularity, "conjugate evaluated at a breakpoint", x);
    return (log_abs(dl) - log_abs(dm)) / kPi + c[k];
  };
  // Sum gap by gap, outward from x.
  const auto it = std::upper_bound(lam.begin(), lam.end(), x);
  const std::size_t split = std::min<std::size_t>(static_cast<std::size_t>(it - lam.begin()), gaps);
  double right = 0;
  for (std::size_t k = split; k < gaps; ++k) right += term(k);
  double left = 0;
  for (std::size_t k = split; k-- > 0;) left += term(k);
  return left + right;
}

double hilbert_piecewise(const PiecewiseConstant& u, double x) {
  double acc = 0;
  for (const Piece& p : u.pieces()) {
    if (x == p.a || x == p.b) throw Error(ErrorKind::singularity, "conjugate evaluated at a breakpoint", x);
    acc += p.value * (log_abs(x - p.a) - log_abs(x - p.b) + 0.5 * (std::log1p(p.b * p.b) - std::log1p(p.a * p.a)));
  }
  return acc / kPi;
}

// ---------------------------------------------------------------------------
// Principal-value quadrature

namespace {

/// ∫_a^b f with cells graded geometrically toward x, which lies outside (a, b).
Quad graded(const std::function<double(double)>& f, double a, double b, double x) {
  Quad total;
  if (!(b > a)) return total;
  auto add = [&](const Quad& q) {
    total.value += q.value;
    total.error += q.error;
  };
  const double d = std::min(std::abs(a - x), std::abs(b - x));
  if (d >= b - a) return gk(f, a, b);
  if (a >= x) {
    double lo = a;
    for (double step = d; lo < b; step *= 4) {
      const double hi = std::min(b, a + step * 3);
      add(gk(f, lo, hi));
      lo = hi;
    }
  } else {
    double hi = b;
    for (double step = d; hi > a; step *= 4) {
      const double lo = std::max(a, b - step * 3);
      add(gk(f, lo, hi));
      hi = lo;
    }
  }
  return total;
}

/// π × p.v.∫_{t0}^{tn} s(t)(1/(x - t) + t/(1 + t²)) dt. knots contains the
/// ends and every point where s is not smooth.
Quad pv_core(const std::function<double(double)>& s, const std::vector<double>& knots, double x) {
  const double t0 = knots.front();
  const double tn = knots.back();
  if (!(x > t0 && x < tn)) throw Error(ErrorKind::domain, "x must lie strictly inside the data range", x);
  auto it = std::lower_bound(knots.begin(), knots.end(), x);
  double eps = std::min(x - t0, tn - x);
  if (*it == x) {
    eps = std::min({eps, *std::next(it) - x, x - *std::prev(it)});
  } else {
    eps = std::min({eps, *it - x, x - *std::prev(it)});
  }

  Quad total;
  auto add = [&](const Quad& q) {
    total.value += q.value;
    total.error += q.error;
  };
  // Folded symmetric part around x.
  add(gk([&](double tau) { return -(s(x + tau) - s(x - tau)) / tau; }, 0.0, eps));
  add(gk([&](double t) { return s(t) * t / (1.0 + t * t); }, x - eps, x + eps));

  const auto f = [&](double t) { return s(t) * conj_kernel(x, t); };
  auto far = [&](double a, double b) { add(graded(f, a, b, x)); };
  double prev = t0;
  for (double k : knots) {
    if (k <= x - eps) {
      far(prev, k);
      prev = k;
    }
  }
  far(prev, x - eps);
  prev = x + eps;
  for (double k : knots) {
    if (k >= x + eps) {
      far(prev, k);
      prev = k;
    }
  }
  return total;
}

double finish(const Quad& q, double tol) {
  const double value = q.value / kPi;
  const double err = q.error / kPi;
  if (!std::isfinite(value) || err > tol)
    throw Error(ErrorKind::accuracy,
                "principal-value quadrature did not converge (best estimate " + std::to_string(value) + ")", err, tol);
  return value;
}

}  // namespace

double hilbert_quadrature(const SampledFunction& s, double x, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::precondition, "tolerance must be positive", tol);
  Quad q = pv_core([&](double t) { return s(t); }, s.x(), x);
  const Interval r = s.range();
  q.value += right_ray_const(s.values().back(), r.hi, x) + left_ray_const(s.values().front(), r.lo, x);
  const Quad g = growth_tails(s, x);
  q.value += g.value;
  q.error += g.error;
  return finish(q, tol);
}

double hilbert_quadrature(const PiecewiseConstant& s, double x, double tol) {
  if (!(tol > 0)) throw Error(ErrorKind::precondition, "tolerance must be positive", tol);
  const std::vector<double> knots = s.breakpoints();
  if (knots.empty()) return 0.0;
  if (std::binary_search(knots.begin(), knots.end(), x))
    throw Error(ErrorKind::singularity, "conjugate evaluated at a breakpoint", x);
  const double bg = s.background();
  Quad q;
  if (x > knots.front() && x < knots.back()) {
    q = pv_core([&](double t) { return s(t); }, knots, x);
  } else {
    // No singular point inside the data range.
    const auto f = [&](double t) { return s(t) * conj_kernel(x, t); };
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
      const Quad part = graded(f, knots[i], knots[i + 1], x);
      q.value += part.value;
      q.error += part.error;
    }
  }
  q.value += right_ray_const(bg, knots.back(), x) + left_ray_const(bg, knots.front(), x);
  return finish(q, tol);
}

double hilbert_quadrature(const HalfIndicator& u, double x, double tol) {
  return hilbert_quadrature(u.piecewise(), x, tol);
}

// ---------------------------------------------------------------------------
// Schwartz integral

namespace {

void require_upper(Complex z) {
  if (!(z.imag() > 0) || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw Error(ErrorKind::domain, "Schwartz integral needs Im z > 0", z.imag(), 0.0);
}

const Complex kI{0.0, 1.0};

}  // namespace

Complex schwartz_upper(const PiecewiseConstant& u, Complex z) {
  require_upper(z);
  Complex g = 0;
  for (const Piece& p : u.pieces())
    g += p.value * (std::log(p.b - z) - std::log(p.a - z) - 0.5 * (std::log1p(p.b * p.b) - std::log1p(p.a * p.a)));
  return u.background() - kI * g / kPi;
}

Complex schwartz_upper(const HalfIndicator& u, Complex z) { return schwartz_upper(u.piecewise(), z); }

Complex schwartz_upper(const SampledFunction& s, Complex z) {
  require_upper(z);
  const auto& t = s.x();
  const auto& v = s.values();
  Complex g = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double p = t[k];
    const double q = t[k + 1];
    const double m = (v[k + 1] - v[k]) / (q - p);
    const double c = v[k] - m * p;
    g += (c + m * z) * (std::log(q - z) - std::log(p - z)) + m * (q - p);
    g -= c * 0.5 * (std::log1p(q * q) - std::log1p(p * p)) + m * ((q - p) - (std::atan(q) - std::atan(p)));
  }
  const double L = t.front();
  const double R = t.back();
  g += v.back() * (-std::log(R - z) + 0.5 * std::log1p(R * R));
  g += v.front() * (std::log(L - z) - 0.5 * std::log1p(L * L) + kI * kPi);

  const GrowthClass& gc = s.growth();
  const auto lt = s.left_tail();
  const auto rt = s.right_tail();
  if (gc.kind != GrowthKind::bounded && (lt.b != 0 || rt.b != 0)) {
    if (gc.kind == GrowthKind::poly && gc.K >= 1)
      throw Error(ErrorKind::tail, "Schwartz integral of a poly:K tail with K >= 1 diverges", gc.K, 1.0);
    auto kernel = [&](double tt) { return 1.0 / (tt - z) - tt / (1.0 + tt * tt); };
    auto tail = [&](double b, double edge, double sign) {
      if (b == 0) return;
      const double g0 = s.growth_profile(edge);
      auto h = [&](double tau) {
        const double tt = edge + sign * tau;
        return b * (s.growth_profile(tt) - g0) * kernel(tt);
      };
      const double re = ray([&](double tau) { return h(tau).real(); }, 0.0).value;
      const double im = ray([&](double tau) { return h(tau).imag(); }, 0.0).value;
      g += Complex(re, im);
    };
    tail(rt.b, R, 1.0);
    tail(lt.b, L, -1.0);
  }
  return -kI * g / kPi;
}

// ---------------------------------------------------------------------------
// Diagnostics

GrowthBoundReport growth_bound_check(const SampledFunction& s, double K) {
  GrowthBoundReport rep;
  rep.K = K;
  if (s.growth().kind != GrowthKind::bounded) {
    rep.applicable = false;
    rep.note = "declared growth class " + s.growth().str() + " is unbounded";
    return rep;
  }
  const auto& t = s.x();
  const auto& v = s.values();
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    const double slope = std::abs(v[k + 1] - v[k]) / (t[k + 1] - t[k]);
    rep.derivative_ratio = std::max(rep.derivative_ratio, slope / std::pow(bracket(0.5 * (t[k] + t[k + 1])), K));
  }
  const Interval r = s.range();
  std::vector<double> grid;
  if (r.contains(0.0)) grid.push_back(0.0);
  for (double p = 1.0 / 16; p <= std::max(std::abs(r.lo), std::abs(r.hi)); p *= 2) {
    if (r.contains(p)) grid.push_back(p);
    if (r.contains(-p)) grid.push_back(-p);
  }
  std::sort(grid.begin(), grid.end());
  for (double x : grid) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    const double d = (s.conjugate(x + h) - s.conjugate(x - h)) / (2 * h);
    const double ratio = std::abs(d) / (std::log1p(std::abs(x)) + std::pow(bracket(x), K));
    rep.grid.push_back(x);
    rep.ratios.push_back(ratio);
    if (ratio > rep.C) {
      rep.C = ratio;
      rep.worst_x = x;
    }
  }
  return rep;
}

ZygmundReport zygmund_integral(const SampledFunction& s) { return zygmund_integral(s, s.range()); }

ZygmundReport zygmund_integral(const SampledFunction& s, Interval window) {
  double M = 0;
  for (double v : s.values()) M = std::max(M, std::abs(v));
  if (M == 0) throw Error(ErrorKind::degenerate, "Zygmund integral of the zero function");
  if (!window.bounded() || window.hi < window.lo) throw Error(ErrorKind::window, "Zygmund window must be bounded");
  auto weight = [&](double t) { return std::exp(std::abs(s.conjugate(t)) / M) / (1.0 + t * t); };

  ZygmundReport rep;
  if (window.hi > window.lo) {
    std::vector<double> nodes{window.lo};
    for (double k : s.x())
      if (k > window.lo && k < window.hi) nodes.push_back(k);
    nodes.push_back(window.hi);
    // Gauss-Legendre on each knot interval, cells of length <= <t>/5.
    std::vector<std::pair<double, double>> cells;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      for (double a = nodes[i]; a < nodes[i + 1];) {
        const double b = std::min(nodes[i + 1], a + 0.2 * bracket(a));
        cells.emplace_back(a, b);
        a = b;
      }
    }
    std::vector<double> parts(cells.size());
    parallel_for(cells.size(), [&](std::size_t i) {
      const auto [a, b] = cells[i];
      parts[i] = gauss<double, 10>::integrate(weight, a, b);
    });
    rep.integral = std::accumulate(parts.begin(), parts.end(), 0.0);
  }
  // Tail: the largest exponent seen on a geometric probe beyond each end,
  // times the Poisson mass of the ray.
  auto side_max = [&](double edge, double dir) {
    double worst = 0;
    const double base = std::max(1.0, std::abs(edge));
    for (int j = 0; j <= 12; ++j) {
      const double t = edge + dir * base * (std::ldexp(1.0, j) - 1.0);
      worst = std::max(worst, std::abs(s.conjugate(t)) / M);
    }
    return worst;
  };
  rep.tail = std::exp(side_max(window.hi, 1.0)) * (0.5 * kPi - std::atan(window.hi)) +
             std::exp(side_max(window.lo, -1.0)) * (std::atan(window.lo) + 0.5 * kPi);
  return rep;
}

double poisson_norm(const SampledFunction& s) {
  const auto& t = s.x();
  const auto& v = s.values();
  double acc = 0;
  for (std::size_t k = 0; k + 1 < t.size(); ++k) {
    auto f = [&](double x) { return std::abs(s(x)) / (1.0 + x * x); };
    if (v[k] * v[k + 1] < 0) {
      const double root = t[k] - v[k] * (t[k + 1] - t[k]) / (v[k + 1] - v[k]);
      acc += gk(f, t[k], root).value + gk(f, root, t[k + 1]).value;
    } else {
      acc += gk(f, t[k], t[k + 1]).value;
    }
  }
  const GrowthClass& g = s.growth();
  const auto lt = s.left_tail();
  const auto rt = s.right_tail();
  if (g.kind == GrowthKind::bounded || (lt.b == 0 && rt.b == 0)) {
    return acc + std::abs(v.back()) * (0.5 * kPi - std::atan(t.back())) +
           std::abs(v.front()) * (std::atan(t.front()) + 0.5 * kPi);
  }
  if (g.kind == GrowthKind::poly && g.K >= 1) return kInf;
  acc += ray([&](double tau) { return std::abs(s(t.back() + tau)) / (1.0 + std::pow(t.back() + tau, 2)); }, 0.0).value;
  acc += ray([&](double tau) { return std::abs(s(t.front() - tau)) / (1.0 + std::pow(t.front() - tau, 2)); }, 0.0).value;
  return acc;
}

}  // namespace innerforge

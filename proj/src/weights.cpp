#include "innerforge/weights.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numeric>

namespace innerforge {

std::string_view to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::linear: return "linear";
    case WeightFamily::power: return "power";
    case WeightFamily::sampled: return "sampled";
    case WeightFamily::sum: return "sum";
  }
  return "unknown";
}

struct Weight::Impl {
  virtual ~Impl() = default;
  virtual WeightFamily family() const = 0;
  virtual Interval window() const = 0;
  virtual WeightValue value(double x) const = 0;
  virtual double kappa() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual double scale() const { return 1.0; }
};

namespace {

struct LinearImpl final : Weight::Impl {
  double c;
  explicit LinearImpl(double scale) : c(scale) {}
  WeightFamily family() const override { return WeightFamily::linear; }
  Interval window() const override { return {}; }
  WeightValue value(double x) const override { return {c * x, c, 0.0}; }
  double scale() const override { return c; }
};

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// ∫_a^b f by adaptive Simpson to relative tolerance rtol.
double simpson(const std::function<double(double)>& f, double a, double b, double rtol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, rtol * std::abs(whole) + 1e-300, 40);
}

struct PowerImpl final : Weight::Impl {
  double k;
  double c;
  Interval domain;
  // Antiderivative cache on a uniform grid containing 0.
  double h = 0.25;
  long first_index = 0;
  std::vector<double> cache;

  PowerImpl(double kappa, double scale, Interval cache_window) : k(kappa), c(scale) {
    if (!(kappa > -1.0)) throw Error(ErrorKind::precondition, "power weight needs kappa > -1", kappa);
    if (!(scale > 0.0)) throw Error(ErrorKind::precondition, "power weight needs scale > 0", scale);
    if (closed_form()) {
      domain = Interval{};
      return;
    }
    if (!cache_window.bounded() || cache_window.lo > 0 || cache_window.hi < 0)
      throw Error(ErrorKind::window, "power cache window must be bounded and contain 0");
    domain = cache_window;
    first_index = static_cast<long>(std::floor(domain.lo / h));
    const long last_index = static_cast<long>(std::ceil(domain.hi / h));
    cache.assign(static_cast<std::size_t>(last_index - first_index + 1), 0.0);
    const auto d1 = [this](double t) { return derivative(t); };
    const std::size_t zero = static_cast<std::size_t>(-first_index);
    for (std::size_t i = zero + 1; i < cache.size(); ++i) {
      const double a = grid(i - 1);
      cache[i] = cache[i - 1] + simpson(d1, a, a + h, 1e-12);
    }
    for (std::size_t i = zero; i-- > 0;) {
      const double b = grid(i + 1);
      cache[i] = cache[i + 1] - simpson(d1, b - h, b, 1e-12);
    }
  }

  bool closed_form() const { return k == 0.0 || k == 1.0 || k == 2.0; }
  double grid(std::size_t i) const { return static_cast<double>(first_index + static_cast<long>(i)) * h; }
  double derivative(double x) const { return c * std::pow(1.0 + x * x, 0.5 * k); }

  double antiderivative(double x) const {
    if (k == 0.0) return c * x;
    if (k == 2.0) return c * (x + x * x * x / 3.0);
    if (k == 1.0) return 0.5 * c * (x * bracket(x) + std::asinh(x));
    const double pos = x / h - static_cast<double>(first_index);
    std::size_t i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0,
                                                        static_cast<double>(cache.size() - 1)));
    const double x0 = grid(i);
    if (x == x0) return cache[i];
    using boost::math::quadrature::gauss;
    return cache[i] + gauss<double, 15>::integrate([this](double t) { return derivative(t); }, x0, x);
  }

  WeightFamily family() const override { return WeightFamily::power; }
  Interval window() const override { return domain; }
  double kappa() const override { return k; }
  double scale() const override { return c; }
  WeightValue value(double x) const override {
    const double b2 = 1.0 + x * x;
    const double d1 = c * std::pow(b2, 0.5 * k);
    return {antiderivative(x), d1, k * x * d1 / b2};
  }
};

struct SampledImpl final : Weight::Impl {
  std::vector<double> xs;
  std::vector<double> ys;      // α'
  std::vector<double> slopes;  // PCHIP derivatives of α'
  std::vector<double> cumulative;

  SampledImpl(std::vector<double> x, std::vector<double> y) : xs(std::move(x)), ys(std::move(y)) {
    if (xs.size() != ys.size() || xs.size() < 2)
      throw Error(ErrorKind::size, "sampled weight needs at least two (x, alpha1) pairs");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
        throw Error(ErrorKind::numeric, "non-finite weight sample");
      if (!(ys[i] > 0)) throw Error(ErrorKind::precondition, "alpha1 samples must be positive", ys[i]);
      if (i > 0 && !(xs[i] > xs[i - 1]))
        throw Error(ErrorKind::monotonicity, "weight abscissae must be strictly increasing");
    }
    build_slopes();
    cumulative.assign(xs.size(), 0.0);
    for (std::size_t i = 1; i < xs.size(); ++i) cumulative[i] = cumulative[i - 1] + piece_integral(i - 1, 1.0);
    const double anchor = (xs.front() <= 0 && xs.back() >= 0) ? integral_to(0.0) : 0.0;
    for (double& v : cumulative) v -= anchor;
  }

  void build_slopes() {
    const std::size_t n = xs.size();
    std::vector<double> delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    slopes.assign(n, 0.0);
    slopes[0] = delta[0];
    slopes[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0) continue;
      const double h0 = xs[i] - xs[i - 1];
      const double h1 = xs[i + 1] - xs[i];
      const double w1 = 2 * h1 + h0;
      const double w2 = h1 + 2 * h0;
      slopes[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
    // Endpoint slopes keep the interpolant inside the data range.
    for (std::size_t i : {std::size_t{0}, n - 1}) {
      const double d = delta[i == 0 ? 0 : n - 2];
      if (slopes[i] * d <= 0) slopes[i] = 0;
      if (std::abs(slopes[i]) > 3 * std::abs(d)) slopes[i] = 3 * d;
    }
  }

  std::size_t piece(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin());
    return std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, xs.size() - 2);
  }

  /// ∫ of the Hermite cubic on piece i from its left end to fraction tau.
  double piece_integral(std::size_t i, double tau) const {
    const double hh = xs[i + 1] - xs[i];
    const double t2 = tau * tau;
    const double t3 = t2 * tau;
    const double t4 = t3 * tau;
    const double H00 = tau - t3 + 0.5 * t4;
    const double H10 = 0.5 * t2 - 2.0 * t3 / 3.0 + 0.25 * t4;
    const double H01 = t3 - 0.5 * t4;
    const double H11 = -t3 / 3.0 + 0.25 * t4;
    return hh * (H00 * ys[i] + H10 * hh * slopes[i] + H01 * ys[i + 1] + H11 * hh * slopes[i + 1]);
  }

  double integral_to(double x) const {
    const std::size_t i = piece(x);
    return cumulative[i] + piece_integral(i, (x - xs[i]) / (xs[i + 1] - xs[i]));
  }

  WeightFamily family() const override { return WeightFamily::sampled; }
  Interval window() const override { return {xs.front(), xs.back()}; }
  WeightValue value(double x) const override {
    const std::size_t i = piece(x);
    const double hh = xs[i + 1] - xs[i];
    const double t = (x - xs[i]) / hh;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double y = (2 * t3 - 3 * t2 + 1) * ys[i] + (t3 - 2 * t2 + t) * hh * slopes[i] +
                     (-2 * t3 + 3 * t2) * ys[i + 1] + (t3 - t2) * hh * slopes[i + 1];
    const double dy = ((6 * t2 - 6 * t) * ys[i] + (3 * t2 - 4 * t + 1) * hh * slopes[i] +
                       (-6 * t2 + 6 * t) * ys[i + 1] + (3 * t2 - 2 * t) * hh * slopes[i + 1]) /
                      hh;
    return {cumulative[i] + piece_integral(i, t), y, dy};
  }
};

struct SumImpl final : Weight::Impl {
  std::vector<std::pair<double, Weight>> terms;
  Interval domain;

  explicit SumImpl(std::vector<std::pair<double, Weight>> t) : terms(std::move(t)) {
    if (terms.empty()) throw Error(ErrorKind::size, "composite weight needs at least one term");
    for (const auto& [c, w] : terms) {
      const Interval d = w.window();
      domain.lo = std::max(domain.lo, d.lo);
      domain.hi = std::min(domain.hi, d.hi);
    }
    if (!(domain.lo < domain.hi)) throw Error(ErrorKind::window, "composite weight has empty window");
    // α' > 0 on a probe grid over the (clipped) window.
    const double lo = std::isfinite(domain.lo) ? domain.lo : -1.0e4;
    const double hi = std::isfinite(domain.hi) ? domain.hi : 1.0e4;
    constexpr int kProbes = 4001;
    for (int i = 0; i < kProbes; ++i) {
      const double x = lo + (hi - lo) * i / (kProbes - 1);
      const double d = value(x).alpha1;
      if (!(d > 0))
        throw Error(ErrorKind::precondition, "composite weight derivative is not positive at x = " +
                                                 std::to_string(x), d, 0.0);
    }
  }

  WeightFamily family() const override { return WeightFamily::sum; }
  Interval window() const override { return domain; }
  WeightValue value(double x) const override {
    WeightValue out;
    for (const auto& [c, w] : terms) {
      const WeightValue v = w.eval(x);
      out.alpha += c * v.alpha;
      out.alpha1 += c * v.alpha1;
      out.alpha2 += c * v.alpha2;
    }
    return out;
  }
};

}  // namespace

Weight Weight::linear(double scale) {
  if (!(scale > 0)) throw Error(ErrorKind::precondition, "linear weight needs scale > 0", scale);
  return Weight(std::make_shared<LinearImpl>(scale));
}

Weight Weight::power(double kappa, double scale, Interval cache_window) {
  return Weight(std::make_shared<PowerImpl>(kappa, scale, cache_window));
}

Weight Weight::sampled(std::vector<double> x, std::vector<double> alpha1) {
  return Weight(std::make_shared<SampledImpl>(std::move(x), std::move(alpha1)));
}

Weight Weight::sum(std::vector<std::pair<double, Weight>> terms) {
  return Weight(std::make_shared<SumImpl>(std::move(terms)));
}

WeightFamily Weight::family() const { return impl_->family(); }
Interval Weight::window() const { return impl_->window(); }
double Weight::kappa() const { return impl_->kappa(); }
double Weight::scale() const { return impl_->scale(); }

WeightValue Weight::eval(double x) const {
  if (!impl_->window().contains(x))
    throw Error(ErrorKind::window, "x = " + std::to_string(x) + " outside the weight window", x);
  const WeightValue v = impl_->value(x);
  if (!std::isfinite(v.alpha) || !std::isfinite(v.alpha1) || !std::isfinite(v.alpha2))
    throw Error(ErrorKind::numeric, "non-finite weight value at x = " + std::to_string(x), x);
  return v;
}

double Weight::alpha(double x) const { return eval(x).alpha; }
double Weight::alpha1(double x) const { return eval(x).alpha1; }
double Weight::alpha2(double x) const { return eval(x).alpha2; }

double Weight::distance(double x, double y) const { return std::abs(alpha(x) - alpha(y)); }

double Weight::length(Interval I) const {
  if (I.hi < I.lo) throw Error(ErrorKind::window, "interval endpoints out of order");
  if (I.hi == I.lo) {
    eval(I.lo);
    return 0.0;
  }
  return alpha(I.hi) - alpha(I.lo);
}

double Weight::inverse(double a) const {
  if (family() == WeightFamily::linear) return a / scale();
  Interval d = window();
  // Expand a bracket for unbounded windows.
  double lo = std::isfinite(d.lo) ? d.lo : -1.0;
  double hi = std::isfinite(d.hi) ? d.hi : 1.0;
  while (!std::isfinite(d.lo) && alpha(lo) > a) lo *= 2.0;
  while (!std::isfinite(d.hi) && alpha(hi) < a) hi *= 2.0;
  return invert_increasing([this](double x) { return alpha(x); }, a, lo, hi,
                           [this](double x) { return alpha1(x); });
}

// ---------------------------------------------------------------------------
// Regularity diagnostics

namespace {

struct PairStats {
  ProbeExtreme m{std::numeric_limits<double>::infinity()};
  ProbeExtreme M{0};
  ProbeExtreme C{0};
};

PairStats probe_pairs(const Weight& w, Interval win, std::size_t probes, double R, std::uint64_t seed) {
  PairStats s;
  SeededRng rng(seed);
  const double alo = w.alpha(win.lo);
  const double ahi = w.alpha(win.hi);
  for (std::size_t i = 0; i < probes; ++i) {
    // Stratified in x over the window.
    const double u = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(probes);
    const double x = win.lo + u * win.length();
    if (std::abs(x) < R) continue;
    const WeightValue vx = w.eval(x);
    const double c = std::abs(vx.alpha2) / (vx.alpha1 * vx.alpha1);
    if (c > s.C.value) s.C = {c, x, x};

    const double target = vx.alpha + rng.uniform(-1.0, 1.0);
    if (target <= alo || target >= ahi) continue;
    const double y = w.inverse(target);
    if (std::abs(y) < R || !win.contains(y)) continue;
    const double ratio = vx.alpha1 / w.alpha1(y);
    if (ratio < s.m.value) s.m = {ratio, x, y};
    if (ratio > s.M.value) s.M = {ratio, x, y};
  }
  return s;
}

}  // namespace

RegularityReport regularity_report(const Weight& w, Interval window, std::size_t probes, double R,
                                   std::uint64_t seed) {
  if (probes < 100) throw Error(ErrorKind::precondition, "regularity_report needs >= 100 probes", probes);
  if (!window.bounded() || !(window.lo < window.hi))
    throw Error(ErrorKind::window, "regularity window must be bounded and nonempty");
  RegularityReport rep;
  rep.window = window;
  rep.R = R;
  rep.probes = probes;
  rep.seed = seed;

  const PairStats full = probe_pairs(w, window, probes, R, seed);
  const double mid = 0.5 * (window.lo + window.hi);
  const Interval inner{mid - 0.25 * window.length(), mid + 0.25 * window.length()};
  const PairStats half = probe_pairs(w, inner, probes, R, seed ^ 0x5bd1e995ULL);
  rep.m = full.m;
  rep.M = full.M;
  rep.C = full.C;
  rep.m_inner = half.m.value;
  rep.M_inner = half.M.value;
  rep.C_inner = half.C.value;

  // A constant that grows by more than 2x when the probe range doubles is
  // treated as divergent.
  constexpr double kGrowth = 2.0;
  const bool have_pairs = std::isfinite(full.m.value) && full.M.value > 0;
  rep.comparability_pass = have_pairs && full.m.value > 0 &&
                           (!std::isfinite(half.m.value) ||
                            (full.m.value * kGrowth >= half.m.value && full.M.value <= kGrowth * half.M.value));
  rep.doubling_pass = std::isfinite(full.C.value) && full.C.value <= kGrowth * half.C.value + 1e-12;

  // Lower/upper growth: least-squares slope of log α' against log <x>, then
  // the extreme constants that make the envelope hold on every probe.
  SeededRng rng(seed + 17);
  std::vector<double> lx, ly;
  lx.reserve(probes);
  ly.reserve(probes);
  for (std::size_t i = 0; i < probes; ++i) {
    const double u = (static_cast<double>(i) + rng.uniform()) / static_cast<double>(probes);
    const double x = window.lo + u * window.length();
    lx.push_back(std::log(bracket(x)));
    ly.push_back(std::log(w.alpha1(x)));
  }
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  const double slope = sxx > 0 ? sxy / sxx : 0.0;
  rep.kappa_hat = slope;
  rep.K0_hat = slope;
  double lo_c = std::numeric_limits<double>::infinity();
  double hi_c = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = std::exp(ly[i] - slope * lx[i]);
    lo_c = std::min(lo_c, r);
    hi_c = std::max(hi_c, r);
  }
  rep.c_hat = lo_c;
  rep.C_upper = hi_c;
  rep.lower_growth_pass = slope > -1.0 && lo_c > 0 && std::isfinite(hi_c);
  return rep;
}

// ---------------------------------------------------------------------------
// Densities

namespace {

void check_density_inputs(const Weight& w, std::span<const double> points, Interval window,
                          std::span<const double> r_list, double total) {
  if (r_list.empty()) throw Error(ErrorKind::size, "density needs at least one r");
  if (!window.bounded()) throw Error(ErrorKind::window, "density window must be bounded");
  for (double r : r_list) {
    if (!(r > 0)) throw Error(ErrorKind::precondition, "density window lengths must be positive", r);
    if (r > total)
      throw Error(ErrorKind::window, "r exceeds the window alpha-length", r, total);
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!window.contains(points[i])) throw Error(ErrorKind::window, "lattice point outside window", points[i]);
    if (i > 0 && !(points[i] > points[i - 1]))
      throw Error(ErrorKind::monotonicity, "lattice points must be strictly increasing");
  }
  (void)w;
}

std::size_t count_in(const std::vector<double>& a, double s, double e) {
  return static_cast<std::size_t>(std::upper_bound(a.begin(), a.end(), e) -
                                  std::lower_bound(a.begin(), a.end(), s));
}

DensityReport density(const Weight& w, std::span<const double> points, Interval window,
                      std::span<const double> r_list, DensityKind kind) {
  const double A = w.alpha(window.lo);
  const double B = w.alpha(window.hi);
  check_density_inputs(w, points, window, r_list, B - A);
  std::vector<double> a(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) a[i] = w.alpha(points[i]);

  DensityReport rep;
  rep.kind = kind;
  for (double r : r_list) {
    std::vector<double> starts{A, B - r};
    for (double ak : a) {
      for (double s : {ak, ak - r})
        if (s >= A && s <= B - r) starts.push_back(s);
    }
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    if (kind == DensityKind::lower) {
      // Counts are piecewise constant between events; the infimum lives on
      // the open pieces.
      const std::size_t n = starts.size();
      for (std::size_t i = 0; i + 1 < n; ++i) starts.push_back(0.5 * (starts[i] + starts[i + 1]));
    }
    bool first = true;
    std::size_t best = 0;
    double best_s = A;
    for (double s : starts) {
      const std::size_t c = count_in(a, s, s + r);
      const bool better = kind == DensityKind::upper ? c > best : c < best;
      if (first || better) {
        best = c;
        best_s = s;
        first = false;
      }
    }
    DensityRow row;
    row.r = r;
    row.count = best;
    row.ratio = static_cast<double>(best) / r;
    row.interval_left = w.inverse(best_s);
    row.interval_right = w.inverse(std::min(best_s + r, B));
    rep.rows.push_back(row);
  }
  std::sort(rep.rows.begin(), rep.rows.end(), [](const auto& x, const auto& y) { return x.r < y.r; });
  rep.limit_estimate = rep.rows.back().ratio;
  const std::size_t k = std::min<std::size_t>(3, rep.rows.size());
  for (std::size_t i = rep.rows.size() - k; i < rep.rows.size(); ++i) rep.trend.push_back(rep.rows[i].ratio);
  return rep;
}

}  // namespace

DensityReport upper_density(const Weight& w, std::span<const double> points, Interval window,
                            std::span<const double> r_list) {
  if (points.empty()) throw Error(ErrorKind::size, "upper density needs a nonempty lattice");
  return density(w, points, window, r_list, DensityKind::upper);
}

DensityReport lower_density(const Weight& w, std::span<const double> points, Interval window,
                            std::span<const double> r_list) {
  if (points.empty()) throw Error(ErrorKind::size, "lower density needs a nonempty lattice");
  return density(w, points, window, r_list, DensityKind::lower);
}

}  // namespace innerforge

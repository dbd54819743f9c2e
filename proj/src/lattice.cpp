#include "innerforge/lattice.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <string>

namespace innerforge {

Lattice::Lattice(std::vector<double> points, Interval window) : points_(std::move(points)), window_(window) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i])) throw Error(ErrorKind::numeric, "non-finite lattice point");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw Error(ErrorKind::monotonicity,
                  "lattice points not strictly increasing at index " + std::to_string(i), points_[i]);
    if (!window_.contains(points_[i]))
      throw Error(ErrorKind::window, "lattice point outside window", points_[i]);
  }
  auto it = std::lower_bound(points_.begin(), points_.end(), 0.0);
  origin_ = it == points_.end() ? 0 : static_cast<std::size_t>(it - points_.begin());
}

std::vector<double> Lattice::midpoints() const {
  std::vector<double> out;
  if (points_.size() < 2) return out;
  out.reserve(points_.size() - 1);
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) out.push_back(0.5 * (points_[i] + points_[i + 1]));
  return out;
}

long Lattice::index_at_or_below(double x) const {
  auto it = std::upper_bound(points_.begin(), points_.end(), x);
  return static_cast<long>(it - points_.begin()) - 1;
}

namespace {

// n for a sorted vector: #(0, x] or -#(x, 0). A point at 0 is never counted.
long count_sorted(const std::vector<double>& v, double x) {
  if (x >= 0) {
    const auto zero_hi = std::upper_bound(v.begin(), v.end(), 0.0);
    return static_cast<long>(std::upper_bound(v.begin(), v.end(), x) - zero_hi);
  }
  const auto zero_lo = std::lower_bound(v.begin(), v.end(), 0.0);
  return -static_cast<long>(zero_lo - std::upper_bound(v.begin(), v.end(), x));
}

}  // namespace

long counting_function(const Lattice& lattice, double x) { return count_sorted(lattice.points(), x); }

Lattice level_set(const PhaseFunction& f, Interval window, double tol) {
  if (!window.bounded() || !(window.lo < window.hi))
    throw Error(ErrorKind::window, "level_set needs a bounded nonempty window");
  if (!(tol > 0)) throw Error(ErrorKind::precondition, "level_set tolerance must be positive", tol);
  if (!f.f) throw Error(ErrorKind::precondition, "phase function has no evaluator");

  const double flo = f.f(window.lo);
  const double fhi = f.f(window.hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) throw Error(ErrorKind::numeric, "non-finite phase at window end");
  const double kmin = std::ceil(flo / kTwoPi);
  const double kmax = std::floor(fhi / kTwoPi);
  const double expected = std::max(0.0, kmax - kmin + 1);
  if (expected > 5.0e7) throw Error(ErrorKind::size, "level set too large", expected);

  // Monotonicity probe grid, also used for bracketing.
  const std::size_t m = std::max<std::size_t>(2049, static_cast<std::size_t>(8 * expected) + 1);
  std::vector<double> xs(m), fs(m);
  for (std::size_t i = 0; i < m; ++i) {
    xs[i] = i + 1 == m ? window.hi : window.lo + window.length() * static_cast<double>(i) / (m - 1);
    fs[i] = f.f(xs[i]);
    if (!std::isfinite(fs[i])) throw Error(ErrorKind::numeric, "non-finite phase value", xs[i]);
    if (i > 0 && !(fs[i] > fs[i - 1]))
      throw Error(ErrorKind::monotonicity, "phase not increasing near x = " + std::to_string(xs[i]), xs[i]);
    if (f.fprime) {
      const double d = f.fprime(xs[i]);
      if (!(d > 0)) throw Error(ErrorKind::monotonicity, "phase derivative not positive at x = " +
                                                             std::to_string(xs[i]), d, 0.0);
    }
  }

  std::vector<double> roots;
  roots.reserve(static_cast<std::size_t>(expected));
  for (double k = kmin; k <= kmax; k += 1.0) {
    const double target = kTwoPi * k;
    const auto it = std::lower_bound(fs.begin(), fs.end(), target);
    const std::size_t j = static_cast<std::size_t>(it - fs.begin());
    double root;
    if (j < m && fs[j] == target) {
      root = xs[j];
    } else {
      if (j == 0 || j == m) throw Error(ErrorKind::consistency, "level " + std::to_string(k) + " not bracketed");
      root = invert_increasing(f.f, target, xs[j - 1], xs[j], f.fprime, 1e-15, 60);
    }
    const double scale = f.fprime ? std::max(std::abs(f.fprime(root)), 1.0) : 1.0;
    const double resid = std::abs(f.f(root) - target);
    if (resid > std::max(tol * scale, 4e-16 * std::max(1.0, std::abs(target))))
      throw Error(ErrorKind::consistency, "root polishing did not reach tolerance", resid, tol * scale);
    roots.push_back(root);
  }
  for (std::size_t i = 1; i < roots.size(); ++i)
    if (!(roots[i] > roots[i - 1])) throw Error(ErrorKind::consistency, "coincident level-set roots", roots[i]);
  if (static_cast<double>(roots.size()) != expected)
    throw Error(ErrorKind::consistency, "root count differs from the endpoint formula",
                static_cast<double>(roots.size()), expected);
  return Lattice(std::move(roots), window);
}

SeparationStats separation_stats(const Weight& w, const Lattice& lattice) {
  if (lattice.size() < 2) throw Error(ErrorKind::size, "separation needs at least two points");
  SeparationStats s;
  s.delta_sep = std::numeric_limits<double>::infinity();
  double prev = w.alpha(lattice[0]);
  for (std::size_t i = 0; i + 1 < lattice.size(); ++i) {
    const double next = w.alpha(lattice[i + 1]);
    const double d = next - prev;
    if (d < s.delta_sep) {
      s.delta_sep = d;
      s.argmin = i;
    }
    if (d > s.gap_max) {
      s.gap_max = d;
      s.argmax = i;
    }
    prev = next;
  }
  return s;
}

GapComparability gap_comparability(const Weight& w, const Lattice& lattice) {
  if (lattice.size() < 2) throw Error(ErrorKind::size, "gap comparability needs at least two points");
  GapComparability g{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i + 1 < lattice.size(); ++i) {
    const double v = w.alpha1(lattice[i]) * (lattice[i + 1] - lattice[i]);
    g.c = std::min(g.c, v);
    g.C = std::max(g.C, v);
  }
  return g;
}

DensityReport upper_density(const Weight& w, const Lattice& lattice, std::span<const double> r_list) {
  return upper_density(w, lattice.points(), lattice.window(), r_list);
}

DensityReport lower_density(const Weight& w, const Lattice& lattice, std::span<const double> r_list) {
  return lower_density(w, lattice.points(), lattice.window(), r_list);
}

// ---------------------------------------------------------------------------

namespace {

class Regularizer {
 public:
  Regularizer(std::vector<double> alphas, double sep_min) : cur_(std::move(alphas)), sep_min_(sep_min) {}

  /// Inserts one point in (L, R) at the admissible α-position closest to ideal.
  void insert_near(double L, double R, double ideal) {
    const double step = sep_min_ * (1 + 1e-12);
    std::vector<double> cands{std::clamp(ideal, L, R)};
    const auto lo = std::lower_bound(cur_.begin(), cur_.end(), L - step);
    const auto hi = std::upper_bound(cur_.begin(), cur_.end(), R + step);
    for (auto it = lo; it != hi; ++it) {
      cands.push_back(*it - step);
      cands.push_back(*it + step);
      if (std::next(it) != cur_.end()) cands.push_back(0.5 * (*it + *std::next(it)));
    }
    cands.push_back(0.5 * (L + R));
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double c : cands) {
      if (!(c > L && c < R) || nearest(c) < sep_min_) continue;
      if (std::isnan(best) || std::abs(c - ideal) < std::abs(best - ideal)) best = c;
    }
    if (std::isnan(best))
      throw Error(ErrorKind::packing,
                  "no admissible insertion point in block alpha in (" + std::to_string(L) + ", " +
                      std::to_string(R) + ")",
                  R - L, sep_min_);
    cur_.insert(std::upper_bound(cur_.begin(), cur_.end(), best), best);
    inserted_.push_back(best);
  }

  /// Points with 0 < ±α <= y (side +1 right of 0, -1 left of 0).
  long outward_count(double y, int side) const {
    if (side > 0) return static_cast<long>(std::upper_bound(cur_.begin(), cur_.end(), y) -
                                           std::upper_bound(cur_.begin(), cur_.end(), 0.0));
    return static_cast<long>(std::lower_bound(cur_.begin(), cur_.end(), 0.0) -
                             std::lower_bound(cur_.begin(), cur_.end(), -y));
  }

  std::size_t count_open_closed(double L, double R) const {
    return static_cast<std::size_t>(std::upper_bound(cur_.begin(), cur_.end(), R) -
                                    std::upper_bound(cur_.begin(), cur_.end(), L));
  }

  const std::vector<double>& points() const { return cur_; }
  const std::vector<double>& inserted() const { return inserted_; }

 private:
  double nearest(double a) const {
    double d = std::numeric_limits<double>::infinity();
    auto it = std::lower_bound(cur_.begin(), cur_.end(), a);
    if (it != cur_.end()) d = std::min(d, *it - a);
    if (it != cur_.begin()) d = std::min(d, a - *std::prev(it));
    return d;
  }

  std::vector<double> cur_;
  std::vector<double> inserted_;
  double sep_min_;
};

}  // namespace

RegularizationResult regularize(const Weight& w, const Lattice& lattice, double delta, double N0,
                                double sep_min, std::size_t min_new) {
  const Interval win = lattice.window();
  if (!win.bounded() || !win.contains(0.0))
    throw Error(ErrorKind::window, "regularize needs a bounded window containing 0");
  if (!(delta > 0 && delta < 1)) throw Error(ErrorKind::precondition, "delta must lie in (0, 1)", delta);
  if (!(N0 > 0)) throw Error(ErrorKind::precondition, "block length must be positive", N0);
  if (!(sep_min > 0)) throw Error(ErrorKind::precondition, "sep_min must be positive", sep_min);

  const double A = w.alpha(win.lo);
  const double B = w.alpha(win.hi);
  std::vector<double> a(lattice.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = w.alpha(lattice[i]);
  for (std::size_t i = 1; i < a.size(); ++i)
    if (a[i] - a[i - 1] < sep_min)
      throw Error(ErrorKind::packing, "input lattice is already closer than sep_min", a[i] - a[i - 1], sep_min);

  // Density precondition: any interval of α-length >= N0 holding c points
  // has length >= max(N0, minimal span of c consecutive points).
  const double slope = (1.0 - delta) / kTwoPi;
  for (std::size_t c = 1; c <= a.size(); ++c) {
    double span = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + c <= a.size(); ++i) span = std::min(span, a[i + c - 1] - a[i]);
    const double allowed = slope * std::max(N0, span);
    if (!(static_cast<double>(c) < allowed))
      throw Error(ErrorKind::threshold,
                  "density precondition fails: " + std::to_string(c) + " points in alpha-length " +
                      std::to_string(std::max(N0, span)),
                  static_cast<double>(c), allowed);
  }

  RegularizationResult res;
  res.delta = delta;
  res.N0 = N0;
  Regularizer reg(a, sep_min);

  // Cumulative n at a block edge: the integer part of (1-δ)α/2π toward 0.
  auto target = [&](double edge) { return static_cast<long>(std::trunc(slope * edge)); };

  // The k-th point outward from 0 is due at α = ±2πk/(1-δ); a missing one
  // is placed there, or as close as separation allows on that side of 0.
  auto due = [&](long k) { return static_cast<double>(k) / slope; };
  auto fill = [&](double L, double R, int side, long need) {
    const double outer = side > 0 ? R : -L;
    std::size_t added = 0;
    long k = std::max<long>(1, reg.outward_count(side > 0 ? L : -R, side));
    for (; k <= need; ++k) {
      if (reg.outward_count(due(k), side) >= k) continue;
      reg.insert_near(side > 0 ? 0.0 : A, side > 0 ? B : 0.0, side * due(k));
      ++added;
    }
    while (reg.outward_count(outer, side) < need) {
      reg.insert_near(L, R, side * outer);
      ++added;
    }
    return added;
  };

  // Right of 0: blocks (jN0, (j+1)N0], cumulative n at the right edge.
  for (double L = 0; L < B; L += N0) {
    const double R = std::min(L + N0, B);
    BlockCount bc{L, R, reg.count_open_closed(L, R), 0, target(R)};
    bc.added = fill(L, R, +1, bc.target);
    res.blocks.push_back(bc);
  }
  // Left of 0: blocks [(j-1)N0, jN0), cumulative n at the left edge.
  for (double R = 0; R > A; R -= N0) {
    const double L = std::max(R - N0, A);
    BlockCount bc{L, R, reg.count_open_closed(L, R), 0, target(L)};
    bc.added = fill(L, R, -1, -bc.target);
    res.blocks.push_back(bc);
  }
  std::sort(res.blocks.begin(), res.blocks.end(),
            [](const BlockCount& x, const BlockCount& y) { return x.alpha_left < y.alpha_left; });

  // Guarantee a minimum number of new points, placed near the window ends.
  for (std::size_t k = reg.inserted().size(), turn = 0; k < min_new; ++k, ++turn) {
    const bool right = turn % 2 == 0 || res.blocks.size() == 1;
    BlockCount& bc = right ? res.blocks.back() : res.blocks.front();
    reg.insert_near(bc.alpha_left, bc.alpha_right, right ? bc.alpha_right : bc.alpha_left);
    ++bc.added;
  }

  std::vector<double> xs = lattice.points();
  for (double p : reg.inserted()) xs.push_back(std::clamp(w.inverse(p), win.lo, win.hi));
  std::sort(xs.begin(), xs.end());
  res.lattice = Lattice(std::move(xs), win);
  res.added = reg.inserted().size();

  // n is a right-continuous step function, so the sup of the deviation is
  // attained at a window end or on either side of a jump.
  const std::vector<double>& cur = reg.points();
  auto consider = [&](double p, long n) {
    const double dev = std::abs((1.0 - delta) * p - kTwoPi * static_cast<double>(n));
    if (dev > res.sup_deviation) {
      res.sup_deviation = dev;
      res.sup_at = p;
    }
  };
  consider(A, count_sorted(cur, A));
  consider(B, count_sorted(cur, B));
  for (const BlockCount& bc : res.blocks) {
    consider(bc.alpha_left, count_sorted(cur, bc.alpha_left));
    consider(bc.alpha_right, count_sorted(cur, bc.alpha_right));
  }
  for (double p : cur) {
    const long n = count_sorted(cur, p);
    consider(p, n);
    if (p != 0) consider(p, n - 1);
  }
  res.sup_at = w.inverse(res.sup_at);
  res.certified_bound = kTwoPi * N0 + kTwoPi + 1.0;
  res.separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < cur.size(); ++i) res.separation = std::min(res.separation, cur[i] - cur[i - 1]);
  return res;
}

std::vector<double> read_points(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    double v = 0;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
      throw Error(ErrorKind::io, "line " + std::to_string(lineno) + ": not a finite decimal number");
    if (!out.empty() && !(v > out.back()))
      throw Error(ErrorKind::io, "line " + std::to_string(lineno) + ": points must be strictly increasing", v);
    out.push_back(v);
  }
  return out;
}

}  // namespace innerforge

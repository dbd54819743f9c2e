#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "innerforge/lattice.hpp"

using namespace innerforge;

namespace {

Lattice progression(double step, Interval w) {
  std::vector<double> pts;
  for (long k = static_cast<long>(std::ceil(w.lo / step)); k * step <= w.hi; ++k) pts.push_back(k * step);
  return Lattice(pts, w);
}

PhaseFunction phase(std::function<double(double)> f, std::function<double(double)> fp, Interval w) {
  return {std::move(f), std::move(fp), w, std::nullopt};
}

double bisect(const std::function<double(double)>& g, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

ErrorKind kind_of(const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::usage;
}

}  // namespace

TEST_CASE("level sets of simple phases") {
  const Lattice a = level_set(phase([](double x) { return x; }, [](double) { return 1.0; }, {-10, 10}), {-10, 10});
  REQUIRE(a.size() == 3);
  CHECK(a[0] == doctest::Approx(-kTwoPi).epsilon(1e-14));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK(a.origin() == 1);

  const Lattice b = level_set(phase([](double x) { return 2 * x; }, [](double) { return 2.0; }, {0, 7}), {0, 7});
  REQUIRE(b.size() == 3);
  CHECK(b[0] == 0.0);
  CHECK(b[1] == doctest::Approx(kPi).epsilon(1e-14));
  CHECK(b[2] == doctest::Approx(kTwoPi).epsilon(1e-14));
}

TEST_CASE("level set of x + sin(x)/2 against a bisection oracle") {
  auto f = [](double x) { return x + 0.5 * std::sin(x); };
  const Lattice l = level_set(phase(f, [](double x) { return 1 + 0.5 * std::cos(x); }, {0, 8}), {0, 8});
  REQUIRE(l.size() == 2);
  CHECK(l[0] == 0.0);
  const double oracle = bisect([&](double x) { return f(x) - kTwoPi; }, 0.0, 8.0);
  CHECK(std::abs(l[1] - oracle) <= 1e-12);
}

TEST_CASE("level set errors") {
  CHECK(kind_of([] {
          (void)level_set(phase([](double x) { return x * x; }, [](double x) { return 2 * x; }, {-10, 10}), {-10, 10});
        }) == ErrorKind::monotonicity);
}

TEST_CASE("level set of the linear weight is equispaced") {
  const Weight w = Weight::linear();
  const Interval win{-300, 300};
  const Lattice l = level_set({[](double x) { return x; }, [](double) { return 1.0; }, win, w}, win);
  const SeparationStats s = separation_stats(w, l);
  CHECK(s.delta_sep == doctest::Approx(kTwoPi).epsilon(1e-12));
  CHECK(s.gap_max == doctest::Approx(kTwoPi).epsilon(1e-12));
}

TEST_CASE("separation statistics") {
  const Weight lin = Weight::linear();
  const SeparationStats a = separation_stats(lin, progression(kTwoPi, {-40, 40}));
  CHECK(a.delta_sep == doctest::Approx(kTwoPi));
  CHECK(a.gap_max == doctest::Approx(kTwoPi));

  const SeparationStats b = separation_stats(lin, Lattice({0.0, 1.0, 3.0}, {-1, 4}));
  CHECK(b.delta_sep == 1.0);
  CHECK(b.gap_max == 2.0);

  // power κ = 2: d_α grows away from 0; oracle by direct α differences
  const Weight pw = Weight::power(2.0);
  const Lattice l = progression(kTwoPi, {-40, 40});
  double lo = 1e300, hi = 0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    auto alpha = [](double x) { return x + x * x * x / 3; };
    const double d = alpha(l[i]) - alpha(l[i - 1]);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  const SeparationStats c = separation_stats(pw, l);
  CHECK(c.delta_sep == doctest::Approx(lo).epsilon(1e-12));
  CHECK(c.gap_max == doctest::Approx(hi).epsilon(1e-12));

  CHECK(kind_of([&] { (void)separation_stats(lin, Lattice({1.0}, {0, 2})); }) == ErrorKind::size);
}

TEST_CASE("counting function sign convention") {
  const Lattice l = progression(kTwoPi, {-40, 40});
  CHECK(counting_function(l, 7.0) == 1);
  CHECK(counting_function(l, 0.0) == 0);
  CHECK(counting_function(l, -7.0) == -1);
  CHECK(counting_function(l, -kTwoPi) == 0);
  CHECK(counting_function(l, -kTwoPi - 1e-9) == -1);
  CHECK(counting_function(l, -1e-9) == 0);
  CHECK(counting_function(l, -20.0) == -3);
}

TEST_CASE("lattice invariants: interleaving and unit jumps") {
  SeededRng rng(3);
  std::vector<double> pts;
  double x = -50;
  while (x < 50) {
    pts.push_back(x);
    x += rng.uniform(0.3, 4.0);
  }
  const Lattice l(pts, {-60, 60});
  const auto mids = l.midpoints();
  REQUIRE(mids.size() + 1 == l.size());
  for (std::size_t n = 0; n < mids.size(); ++n) {
    CHECK(l[n] < mids[n]);
    CHECK(mids[n] < l[n + 1]);
  }
  for (std::size_t n = 0; n < l.size(); ++n) {
    const double lam = l[n];
    if (lam == 0) continue;
    CHECK(counting_function(l, lam) - counting_function(l, std::nextafter(lam, -1e300)) == 1);
  }
}

TEST_CASE("lattice construction errors") {
  CHECK(kind_of([] { Lattice({1.0, 1.0}, {0, 2}); }) == ErrorKind::monotonicity);
  CHECK(kind_of([] { Lattice({1.0, 5.0}, {0, 2}); }) == ErrorKind::window);
}

TEST_CASE("gap comparability for f ~ alpha") {
  const Weight w = Weight::power(0.5, 1.0, {-200, 200});
  const Interval win{-150, 150};
  const Lattice l = level_set({[&](double x) { return w.alpha(x) + 0.3 * std::sin(x); },
                               [&](double x) { return w.alpha1(x) + 0.3 * std::cos(x); }, win, w},
                              win);
  const GapComparability g = gap_comparability(w, l);
  CHECK(g.c > 0);
  CHECK(g.c <= g.C);
  CHECK(g.C < 4 * kTwoPi);
}

TEST_CASE("regularize 4 pi Z") {
  const Weight w = Weight::linear();
  const Interval win{-400, 400};
  const Lattice base = progression(2 * kTwoPi, win);
  const double sep_min = 0.5 * kTwoPi;
  const RegularizationResult r = regularize(w, base, 0.1, 20.0, sep_min);
  for (double x : base.points()) CHECK(std::binary_search(r.lattice.points().begin(), r.lattice.points().end(), x));
  CHECK(r.lattice.size() > base.size());
  CHECK(r.added >= 3);
  CHECK(separation_stats(w, r.lattice).delta_sep >= sep_min);
  CHECK(r.sup_deviation <= kTwoPi + 1);
  CHECK(r.sup_deviation <= r.certified_bound);
  CHECK(r.certified_bound == doctest::Approx(kTwoPi * 20 + kTwoPi + 1));
  // measured sup by direct evaluation on a fine grid
  double sup = 0;
  for (int i = 0; i <= 80000; ++i) {
    const double x = win.lo + i * 0.01;
    sup = std::max(sup, std::abs(0.9 * x - kTwoPi * counting_function(r.lattice, x)));
  }
  CHECK(sup <= r.sup_deviation + 1e-9);
}

TEST_CASE("regularize an empty lattice") {
  const Lattice empty(std::vector<double>{}, {-60, 60});
  const RegularizationResult r = regularize(Weight::linear(), empty, 0.5, kTwoPi, 1.0);
  CHECK(r.lattice.size() >= 3);
  CHECK(r.sup_deviation <= r.certified_bound);
}

TEST_CASE("regularize refuses a dense lattice") {
  const Lattice pi = progression(kPi, {-200, 200});
  CHECK(kind_of([&] { (void)regularize(Weight::linear(), pi, 0.1, 20.0, 1.0); }) == ErrorKind::threshold);
}

TEST_CASE("read_points") {
  std::istringstream ok("# header\n0.5\n\n1.5\n2.5\n");
  CHECK(read_points(ok) == std::vector<double>{0.5, 1.5, 2.5});
  std::istringstream unsorted("1\n3\n2\n");
  try {
    (void)read_points(unsorted);
    FAIL("expected io error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::io);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream junk("1\nabc\n");
  CHECK_THROWS_AS(read_points(junk), Error);
}

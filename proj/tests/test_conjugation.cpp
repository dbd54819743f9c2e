#include <doctest.h>

#include <cmath>
#include <vector>

#include "innerforge/conjugation.hpp"
#include "innerforge/lattice.hpp"

using namespace innerforge;

namespace {

// Samples on t = sinh(u), dense near 0 and reaching |t| ~ sinh(umax).
SampledFunction sinh_samples(const std::function<double(double)>& f, double umax, int n, GrowthClass g = {}) {
  std::vector<double> x, v;
  for (int i = 0; i <= n; ++i) {
    const double t = std::sinh(-umax + 2 * umax * i / n);
    x.push_back(t);
    v.push_back(f(t));
  }
  return SampledFunction(x, v, g);
}

std::vector<double> two_pi_nodes(int lo, int hi) {
  std::vector<double> n;
  for (int k = lo; k <= hi; ++k) n.push_back(kTwoPi * k);
  return n;
}

// Q of value·1_(a,b) at z = x + iy, from the antiderivative of the kernel.
double q_piece(double a, double b, double value, double x, double y) {
  return value / kPi *
         (0.5 * std::log(((x - a) * (x - a) + y * y) / ((x - b) * (x - b) + y * y)) +
          0.5 * std::log((1 + b * b) / (1 + a * a)));
}

// P of value·1_(a,b) at z = x + iy.
double p_piece(double a, double b, double value, double x, double y) {
  return value / kPi * (std::atan((b - x) / y) - std::atan((a - x) / y));
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

TEST_CASE("closed form for the indicator of (0,1)") {
  const PiecewiseConstant ind({{0.0, 1.0, 1.0}});
  const double expected = 3 * std::log(2.0) / kTwoPi;
  CHECK(hilbert_piecewise(ind, 2.0) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.3309534).epsilon(1e-6));
  CHECK(hilbert_quadrature(ind, 2.0) == doctest::Approx(expected).epsilon(1e-9));
  CHECK(kind_of([&] { (void)hilbert_piecewise(ind, 1.0); }) == ErrorKind::singularity);
}

TEST_CASE("densely sampled indicator matches the closed form") {
  std::vector<double> x, v;
  for (int i = -4000; i <= 8000; ++i) {
    const double t = i * 1e-3;
    x.push_back(t);
    v.push_back(t > 0 && t < 1 ? 1.0 : 0.0);
  }
  const SampledFunction s(x, v);
  CHECK(hilbert_quadrature(s, 2.0, 1e-8) == doctest::Approx(3 * std::log(2.0) / kTwoPi).epsilon(1e-3));
}

TEST_CASE("half indicator of 2 pi Z: closed form against quadrature") {
  const HalfIndicator u(two_pi_nodes(-7, 8));
  const double x = kPi / 2;
  const double closed = hilbert_piecewise(u, x);
  CHECK(std::abs(closed - hilbert_quadrature(u, x)) <= 1e-6 * (1 + std::abs(closed)));
  CHECK(kind_of([&] { (void)hilbert_piecewise(u, 0.0); }) == ErrorKind::singularity);
  CHECK(kind_of([&] { (void)hilbert_piecewise(u, kPi); }) == ErrorKind::singularity);
}

TEST_CASE("oracle equivalence on random half indicators") {
  SeededRng rng(5);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> nodes{-30.0};
    while (nodes.back() < 30) nodes.push_back(nodes.back() + rng.uniform(0.5, 5.0));
    const HalfIndicator u(nodes);
    for (int i = 0; i < 100; ++i) {
      const double x = rng.uniform(-35, 35);
      const double closed = hilbert_piecewise(u, x);
      CHECK(std::abs(closed - hilbert_quadrature(u, x)) <= 1e-6 * (1 + std::abs(closed)));
    }
  }
}

TEST_CASE("constants have zero conjugate") {
  const SampledFunction c({-1e4, -1.0, 0.0, 3.0, 1e4}, {2.5, 2.5, 2.5, 2.5, 2.5});
  CHECK(std::abs(hilbert_quadrature(c, 0.7)) <= 1e-10);
  CHECK(std::abs(c.conjugate(-12.0)) <= 1e-12);
  const PiecewiseConstant bg({}, 0.5);
  CHECK(std::abs(hilbert_piecewise(bg, 3.0)) <= 1e-15);
}

TEST_CASE("conjugate of the Poisson kernel") {
  // Q[1/(1+t²)](x) = x/(1+x²); the regularizing term integrates an odd function.
  const SampledFunction s = sinh_samples([](double t) { return 1 / (1 + t * t); }, 9.0, 40000);
  CHECK(s.conjugate(1.0) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(s.conjugate(2.0) == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(hilbert_quadrature(s, 1.0, 1e-9) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("conjugate of log<t> is -atan") {
  // log<t> = Re log(t + i); Q vanishes at z = i, so the conjugate is arg(t + i) - π/2.
  const SampledFunction s =
      sinh_samples([](double t) { return std::log(bracket(t)); }, 6.0, 20000, GrowthClass::parse("log"));
  for (double x : {-3.0, -0.5, 0.25, 1.0, 7.0}) CHECK(std::abs(s.conjugate(x) + std::atan(x)) <= 1e-6);
  CHECK(std::abs(hilbert_quadrature(s, 1.0, 1e-9) + std::atan(1.0)) <= 1e-6);
}

TEST_CASE("even data has odd conjugate") {
  const PiecewiseConstant u({{-3.0, -1.0, 1.0}, {1.0, 3.0, 1.0}}, -0.5);
  double first = 0;
  for (double x : {0.3, 0.7, 2.2, 5.0, 11.0}) {
    const double sum = hilbert_piecewise(u, x) + hilbert_piecewise(u, -x);
    if (x == 0.3) first = sum;
    CHECK(std::abs(sum - first) <= 1e-13);
  }
  CHECK(std::abs(first) <= 1e-13);
}

TEST_CASE("schwartz integral examples") {
  const PiecewiseConstant half({}, 0.5);
  for (Complex z : {Complex(0, 1), Complex(3, 2), Complex(-1, 0.1)}) {
    const Complex S = schwartz_upper(half, z);
    CHECK(S.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::abs(S.imag()) <= 1e-14);
  }
  const PiecewiseConstant ind({{-1.0, 1.0, 1.0}});
  CHECK(schwartz_upper(ind, Complex(0, 1)).real() == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(kind_of([&] { (void)schwartz_upper(ind, Complex(0, 0)); }) == ErrorKind::domain);
  CHECK(kind_of([&] { (void)schwartz_upper(ind, Complex(1, -1)); }) == ErrorKind::domain);
}

TEST_CASE("schwartz integral of the 2 pi Z half indicator against direct kernels") {
  const HalfIndicator u(two_pi_nodes(-6, 7));
  const PiecewiseConstant pc = u.piecewise();
  for (Complex z : {Complex(0, 1), Complex(2, 0.5), Complex(-13, 3)}) {
    double p = pc.background(), q = 0;
    for (const Piece& piece : pc.pieces()) {
      const double v = piece.value;  // added to the background
      p += p_piece(piece.a, piece.b, v, z.real(), z.imag());
      q += q_piece(piece.a, piece.b, v, z.real(), z.imag());
    }
    const Complex S = schwartz_upper(u, z);
    CHECK(std::abs(S.real() - p) <= 1e-6 * (1 + std::abs(p)));
    CHECK(std::abs(S.imag() - q) <= 1e-6 * (1 + std::abs(q)));
    if (z == Complex(0, 1)) CHECK(std::abs(S.imag()) <= 1e-12);
  }
}

TEST_CASE("schwartz boundary values of sampled data") {
  const SampledFunction s = sinh_samples([](double t) { return 1 / (1 + t * t); }, 8.0, 8000);
  const double x = 0.5;
  double prev = 1e300;
  for (double y : {1e-1, 1e-2, 1e-3}) {
    const Complex S = schwartz_upper(s, Complex(x, y));
    const double err = std::abs(S.real() - s(x));
    CHECK(err <= 2 * y);
    CHECK(err < prev);
    prev = err;
    CHECK(std::abs(S.imag() - s.conjugate(x)) <= 5 * y);
  }
}

TEST_CASE("pairing stability under doubled extension") {
  const Weight w = Weight::linear();
  const Interval win{-40, 40};
  std::vector<double> pts;
  for (int k = -6; k <= 6; ++k) pts.push_back(kTwoPi * k);
  const Lattice lat(pts, win);
  const HalfIndicator u5 = HalfIndicator::build(w, lat, {TailMode::alpha_regular, 5.0});
  const HalfIndicator u10 = HalfIndicator::build(w, lat, {TailMode::alpha_regular, 10.0});
  CHECK(u10.nodes().size() > u5.nodes().size());
  for (double x : {-33.0, -1.0, 2.5, 30.0}) CHECK(std::abs(hilbert_piecewise(u5, x) - hilbert_piecewise(u10, x)) <= u5.tail_bound());
}

TEST_CASE("sampled function validation") {
  CHECK(kind_of([] { SampledFunction({1.0}, {1.0}); }) == ErrorKind::size);
  CHECK(kind_of([] { SampledFunction({1.0, 0.0}, {1.0, 2.0}); }) == ErrorKind::monotonicity);
  CHECK(kind_of([] { SampledFunction({0.0, 1.0}, {1.0, NAN}); }) == ErrorKind::numeric);
  CHECK(kind_of([] { (void)GrowthClass::parse("cubic"); }) == ErrorKind::usage);
  CHECK(GrowthClass::parse("poly:2").K == 2.0);
  const SampledFunction s({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  CHECK(kind_of([&] { (void)hilbert_quadrature(s, 5.0); }) == ErrorKind::domain);
}

TEST_CASE("growth bound diagnostic") {
  const SampledFunction zero({-50.0, 0.0, 50.0}, {0.0, 0.0, 0.0});
  CHECK(growth_bound_check(zero, 0.0).C == 0.0);
  const SampledFunction bump = sinh_samples([](double t) { return std::exp(-t * t); }, 4.0, 4000);
  const GrowthBoundReport r = growth_bound_check(bump, 0.0);
  CHECK(r.applicable);
  CHECK(std::isfinite(r.C));
  CHECK(r.C > 0);
  const SampledFunction grows({-10.0, 0.0, 10.0}, {10.0, 0.0, 10.0}, GrowthClass::parse("poly:1"));
  CHECK_FALSE(growth_bound_check(grows, 1.0).applicable);
}

TEST_CASE("zygmund diagnostic") {
  const SampledFunction c({-100.0, 100.0}, {3.0, 3.0});
  CHECK(zygmund_integral(c).total() == doctest::Approx(kPi).epsilon(1e-8));
  std::vector<double> x, v;
  for (int i = -2000; i <= 2000; ++i) {
    x.push_back(i * 0.01);
    v.push_back(std::abs(i * 0.01) < 2 ? 1.0 : 0.0);
  }
  const ZygmundReport z = zygmund_integral(SampledFunction(x, v));
  CHECK(std::isfinite(z.total()));
  CHECK(z.total() > kPi);
  const ZygmundReport empty = zygmund_integral(c, {0.0, 0.0});
  CHECK(empty.integral == 0.0);
  CHECK(empty.total() == empty.tail);
  const SampledFunction zero({-1.0, 1.0}, {0.0, 0.0});
  CHECK(kind_of([&] { (void)zygmund_integral(zero); }) == ErrorKind::degenerate);
}

TEST_CASE("poisson norm") {
  const SampledFunction one({-10.0, 10.0}, {1.0, 1.0});
  CHECK(poisson_norm(one) == doctest::Approx(kPi).epsilon(1e-10));
  // ∫ log<t> dt/(1+t²) = π log 2
  const SampledFunction lg =
      sinh_samples([](double t) { return std::log(bracket(t)); }, 6.0, 20000, GrowthClass::parse("log"));
  CHECK(poisson_norm(lg) == doctest::Approx(kPi * std::log(2.0)).epsilon(1e-6));
  const SampledFunction lin({-10.0, 0.0, 10.0}, {-10.0, 0.0, 10.0}, GrowthClass::parse("poly:1"));
  CHECK(std::isinf(poisson_norm(lin)));
}

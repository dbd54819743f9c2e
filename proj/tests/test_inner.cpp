#include <doctest.h>

#include <cmath>
#include <vector>

#include "innerforge/inner.hpp"

using namespace innerforge;

namespace {

Lattice progression(double step, Interval w) {
  std::vector<double> pts;
  for (long k = static_cast<long>(std::ceil(w.lo / step)); k * step <= w.hi; ++k) pts.push_back(k * step);
  return Lattice(pts, w);
}

Lattice jittered(std::uint64_t seed, Interval w) {
  SeededRng rng(seed);
  std::vector<double> pts;
  for (long k = static_cast<long>(std::ceil(w.lo / kTwoPi)); k * kTwoPi <= w.hi; ++k)
    pts.push_back(k == 0 ? 0.0 : k * kTwoPi + rng.uniform(-1.0, 1.0));
  return Lattice(pts, {w.lo - 2, w.hi + 2});
}

// d arg J/dx by central difference.
double fd_arg(const InnerJ& J, double x, double h = 1e-5) { return (J.arg(x + h) - J.arg(x - h)) / (2 * h); }

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

TEST_CASE("J takes the values 1 and -1 exactly on nodes and midpoints") {
  const Lattice l = jittered(2, {-200, 200});
  REQUIRE(l.size() >= 50);
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  const auto mids = l.midpoints();
  for (std::size_t n = 0; n < l.size(); ++n) {
    CHECK(J.eval(l[n]) == std::complex<double>(1.0, 0.0));
    CHECK(J.arg(l[n]) == kTwoPi * static_cast<double>(static_cast<long>(n) - static_cast<long>(l.origin())));
  }
  for (double w : mids) CHECK(J.eval(w) == std::complex<double>(-1.0, 0.0));
  CHECK(J.arg(0.0) == 0.0);
}

TEST_CASE("arg J is increasing and turns by 2 pi per node") {
  const Lattice l = jittered(4, {-100, 100});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  double prev = J.arg(l[0]);
  for (std::size_t n = 1; n < l.size(); ++n) {
    const double a = J.arg(l[n]);
    CHECK(a - prev == doctest::Approx(kTwoPi).epsilon(1e-14));
    const double inside = J.arg(0.5 * (l[n] + l[n - 1]) + 0.3);
    CHECK(inside > prev);
    CHECK(inside < a);
    prev = a;
  }
}

TEST_CASE("derivatives at nodes and midpoints match finite differences") {
  const Lattice l = jittered(6, {-150, 150});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  const auto mids = l.midpoints();
  std::size_t checked = 0;
  for (std::size_t n = 5; n + 5 < l.size(); ++n) {
    const double fd_lam = fd_arg(J, l[n]);
    const double fd_mid = fd_arg(J, mids[n]);
    CHECK(std::abs(J.jprime_at_lambda(n) - fd_lam) <= 1e-4 * fd_lam);
    CHECK(std::abs(J.jprime_at_omega(n) - fd_mid) <= 1e-4 * fd_mid);
    ++checked;
  }
  CHECK(checked >= 20);
}

TEST_CASE("Clark mass times |J'| at a node is 2 pi") {
  const Lattice l = jittered(8, {-150, 150});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  for (std::size_t n = 0; n < l.size(); ++n) {
    CHECK(std::abs(J.sigma_one(n) * J.jprime_at_lambda(n) - kTwoPi) <= 1e-10);
    CHECK(J.sigma_one(n) > 0);
  }
  for (std::size_t n = 0; n + 1 < l.size(); ++n) {
    CHECK(std::abs(J.sigma_minus_one(n) * J.jprime_at_omega(n) - kTwoPi) <= 1e-10);
    CHECK(J.log_A(n) <= 1e-12);
  }
}

TEST_CASE("the two Clark series agree off the nodes") {
  const Lattice l = jittered(10, {-120, 120});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  SeededRng rng(3);
  for (int i = 0; i < 100; ++i) {
    const double x = rng.uniform(-100, 100);
    const double a = J.jprime_series(x, true);
    const double b = J.jprime_series(x, false);
    const double fd = fd_arg(J, x);
    CHECK(std::abs(a - b) <= 1e-4 * b);
    CHECK(std::abs(J.jprime(x) - fd) <= 1e-4 * fd);
  }
}

TEST_CASE("2 pi Z: conjugate is log|tan(x/2)|/pi up to a constant") {
  // The regularized kernel shifts ũ by a constant; u is odd so ũ is even.
  const InnerJ J = InnerJ::build(Weight::linear(), progression(kTwoPi, {-200, 200}));
  auto offset = [&](double x) { return J.conj_u(x) - std::log(std::abs(std::tan(0.5 * x))) / kPi; };
  const double c = offset(0.7);
  for (double x : {2.0, 4.0, -5.5, -1.3, 1.3, 8.8}) CHECK(std::abs(offset(x) - c) <= 2e-3);
  CHECK(std::abs(J.conj_u(1.3) - J.conj_u(-1.3)) <= 1e-3);
  // then tan(arg J/2) = e^{πc} tan(x/2) on (0, π)
  const double x = 1.1;
  CHECK(std::tan(0.5 * J.arg(x)) == doctest::Approx(std::exp(kPi * c) * std::tan(0.5 * x)).epsilon(1e-2));
}

TEST_CASE("inner function errors") {
  const Lattice l = progression(kTwoPi, {-100, 100});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  CHECK(kind_of([&] { (void)J.jprime(l[3]); }) == ErrorKind::redirect);
  CHECK(kind_of([&] { (void)J.jprime(l.midpoints()[3]); }) == ErrorKind::redirect);
  CHECK(kind_of([&] { (void)J.jprime_at_lambda(l.size()); }) == ErrorKind::window);
  CHECK(kind_of([&] { (void)J.jprime_at_omega(l.size() - 1); }) == ErrorKind::window);
  CHECK(kind_of([&] { (void)InnerJ::build(Weight::linear(), Lattice({0.0, 1.0}, {-1, 2})); }) == ErrorKind::size);
}

TEST_CASE("phase approximation stays within 2 pi") {
  const Weight w = Weight::power(0.5, 1.0, {-200, 200});
  const Interval win{-60, 60};
  const PhaseFunction f{[&](double x) { return w.alpha(x) + 0.4 * std::sin(x); },
                        [&](double x) { return w.alpha1(x) + 0.4 * std::cos(x); }, win, w};
  PhaseOptions opt;
  opt.grid_points = 4000;
  const InnerJ J = approximate_phase(w, f, {}, opt);
  REQUIRE(J.certificate());
  const PhaseCertificate& c = *J.certificate();
  CHECK(c.monotone);
  CHECK(c.sup_error <= kTwoPi + c.tail_budget);
  CHECK(c.pass());
  CHECK(c.ratio_min > 0);
  // independent recomputation on an offset grid
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 1000; ++i) {
    const double x = win.lo + (i + 0.37) * win.length() / 1000;
    const double d = f.f(x) - J.arg(x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
  CHECK(0.5 * (hi - lo) <= kTwoPi + c.tail_budget);
}

TEST_CASE("phase approximation refuses incomparable derivatives") {
  const Weight w = Weight::linear();
  const Interval win{-30, 30};
  const PhaseFunction f{[](double x) { return x * x * x; }, [](double x) { return 3 * x * x + 1e-9; }, win, w};
  CHECK(kind_of([&] { (void)approximate_phase(w, f); }) == ErrorKind::hypothesis);
}

TEST_CASE("derivative certificate envelopes") {
  const Lattice l = jittered(12, {-150, 150});
  const InnerJ J = InnerJ::build(Weight::linear(), l);
  const DerivativeCertificate c = fit_derivative_certificate(J, 1000);
  CHECK(c.N0 >= 0);
  CHECK(c.nodes == l.size());
  CHECK(c.grid_points == 1000);
  for (std::size_t n = 0; n < l.size(); ++n) {
    const double L = std::log(bracket(l[n]));
    CHECK(-std::log(J.jprime_at_lambda(n)) - c.N0 * L <= std::log(c.C_lower) + 1e-12);
  }
  // the upper envelope holds on the fitting grid
  const double lo = l[0], hi = l[l.size() - 1];
  for (int i = 0; i < 1000; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / 1000;
    const double L = std::log(bracket(x) * bracket(1.0));
    CHECK(std::log(J.jprime(x)) - c.N0 * L <= std::log(c.C_upper) + 1e-12);
  }
}

TEST_CASE("Blaschke argument") {
  const BlaschkeInner B{0.5, {{1.0, 2.0}, {-3.0, 0.5}}};
  B.validate();
  CHECK(blaschke_arg(B, 0.0) == 0.0);
  for (double x : {-4.0, 0.3, 7.0}) {
    const double h = 1e-6;
    const double fd = (blaschke_arg(B, x + h) - blaschke_arg(B, x - h)) / (2 * h);
    CHECK(blaschke_arg_prime(B, x) == doctest::Approx(fd).epsilon(1e-8));
  }
  // single zero at i: arg' = 2/(1 + x^2)
  const BlaschkeInner one{0.0, {{0.0, 1.0}}};
  CHECK(blaschke_arg_prime(one, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(blaschke_arg(one, 1e9) == doctest::Approx(kPi).epsilon(1e-8));

  CHECK(kind_of([] { BlaschkeInner{0.0, {}}.validate(); }) == ErrorKind::degenerate);
  CHECK(kind_of([] { BlaschkeInner{1.0, {{0.0, -1.0}}}.validate(); }) == ErrorKind::domain);
  CHECK(kind_of([] { BlaschkeInner{-1.0, {}}.validate(); }) == ErrorKind::domain);
}

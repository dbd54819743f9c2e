#include <doctest.h>

#include <cmath>
#include <vector>

#include "innerforge/majorant.hpp"

using namespace innerforge;

namespace {

SampledFunction sampled(const std::function<double(double)>& f, Interval w, int n, GrowthClass g) {
  std::vector<double> x, v;
  for (int i = 0; i <= n; ++i) {
    const double t = w.lo + w.length() * i / n;
    x.push_back(t);
    v.push_back(f(t));
  }
  return SampledFunction(x, v, g);
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

void check_minorant(const MajorantWitness& w) {
  REQUIRE(w.grid.size() == w.f_final.size());
  for (std::size_t i = 0; i < w.grid.size(); ++i) {
    CHECK(w.f_final[i] >= 0);
    CHECK(w.f_final[i] <= w.omega[i]);
  }
  CHECK(w.nontriviality >= 1e-6);
  CHECK(w.sinc.delta * (w.sinc.N0 + 1) < w.eps);
  const MinorantReport r = verify_minorant(w);
  CHECK(r.max_ratio <= 1.0);
  CHECK(r.nontriviality >= 1e-6);
  CHECK(r.points == w.grid.size());
}

}  // namespace

TEST_CASE("sinc correction") {
  const SincCorrection s = sinc_correction(3, 0.2);
  CHECK(s.delta == doctest::Approx(0.2 / 8).epsilon(1e-15));
  CHECK(s(0.0) == 1.0);
  const double x = 7.0;
  CHECK(s(x) == doctest::Approx(std::pow(std::sin(s.delta * x) / (s.delta * x), 4)).epsilon(1e-14));
  CHECK(std::abs(s(kPi / s.delta)) <= 1e-12);
  CHECK(s.delta * (s.N0 + 1) < s.eps);
  CHECK(kind_of([] { (void)sinc_correction(-1, 0.1); }) == ErrorKind::precondition);
  CHECK(kind_of([] { (void)sinc_correction(2, 0.0); }) == ErrorKind::precondition);
}

TEST_CASE("constant Omega: minorant under exp(-1)") {
  MajorantProblem p;
  p.omega = SampledFunction({-40.0, 40.0}, {1.0, 1.0});
  const MajorantWitness w = majorant_pipeline(p);
  CHECK(w.eps == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(w.window.lo == -40.0);
  CHECK(w.window.hi == 40.0);
  for (double v : w.f_final) CHECK(v <= std::exp(-1.0));
  check_minorant(w);

  // log m = -1/2 (α - 2εx - arg I)~, recomputed from I on the witness grid
  std::vector<double> phase;
  for (double x : w.grid) phase.push_back(w.alpha.alpha(x) - 2 * w.eps * x - w.I->arg(x));
  const SampledFunction part(w.grid, phase);
  for (std::size_t i = 0; i < w.grid.size(); i += 37)
    CHECK(std::abs(w.log_m[i] + 0.5 * part.conjugate(w.grid[i])) <= 1e-12);
}

TEST_CASE("logarithmic Omega: minorant under the sampled <x>^-0.2") {
  MajorantProblem p;
  p.omega = sampled([](double x) { return 0.2 * std::log(bracket(x)); }, {-40, 40}, 800, GrowthClass::parse("log"));
  const MajorantWitness w = majorant_pipeline(p);
  CHECK(w.poisson_norm > 0);
  CHECK(std::isfinite(w.poisson_norm));
  for (std::size_t i = 0; i < w.grid.size(); ++i)
    CHECK(w.f_final[i] <= std::exp(-p.omega(w.grid[i])));
  check_minorant(w);
}

TEST_CASE("majorant hypotheses") {
  MajorantProblem p;
  p.omega = SampledFunction({-40.0, 0.0, 40.0}, {40.0, 0.0, 40.0}, GrowthClass::parse("poly:1"));
  CHECK(kind_of([&] { (void)majorant_pipeline(p); }) == ErrorKind::hypothesis);

  MajorantProblem off;
  off.omega = SampledFunction({1.0, 40.0}, {1.0, 1.0});
  CHECK(kind_of([&] { (void)majorant_pipeline(off); }) == ErrorKind::window);

  MajorantProblem big;
  big.omega = SampledFunction({-40.0, 40.0}, {1.0, 1.0});
  MajorantConfig cfg;
  cfg.eps = 0.6;
  CHECK(kind_of([&] { (void)majorant_pipeline(big, cfg); }) == ErrorKind::epsilon);
}

TEST_CASE("corrupted witnesses fail verification") {
  MajorantProblem p;
  p.omega = SampledFunction({-40.0, 40.0}, {1.0, 1.0});
  const MajorantWitness good = majorant_pipeline(p);

  MajorantWitness doubled = good;
  for (double& v : doubled.log_m) v += std::log(2.0);
  CHECK(kind_of([&] { (void)verify_minorant(doubled); }) == ErrorKind::verification);

  MajorantWitness raised = good;
  raised.f_final[raised.f_final.size() / 2] = 2 * raised.omega[raised.f_final.size() / 2];
  CHECK(kind_of([&] { (void)verify_minorant(raised); }) == ErrorKind::verification);

  MajorantWitness budget = good;
  budget.sinc.delta = budget.eps;
  CHECK(kind_of([&] { (void)verify_minorant(budget); }) == ErrorKind::verification);

  MajorantWitness empty = good;
  empty.grid.clear();
  CHECK(kind_of([&] { (void)verify_minorant(empty); }) == ErrorKind::verification);
}

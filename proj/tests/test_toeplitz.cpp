#include <doctest.h>

#include <cmath>
#include <vector>

#include "innerforge/toeplitz.hpp"

using namespace innerforge;

namespace {

Lattice progression(double step, Interval w) {
  std::vector<double> pts;
  for (long k = static_cast<long>(std::ceil(w.lo / step)); k * step <= w.hi; ++k) pts.push_back(k * step);
  return Lattice(pts, w);
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

TEST_CASE("3 pi Z: T vanishes on the lattice with a positive derivative floor") {
  const Lattice l = progression(3 * kPi, {-40, 40});
  const ZeroSetWitness w = zero_set_pipeline(Symbol{}, l);
  CHECK(w.upper_density < 1 / kTwoPi);
  CHECK(w.delta > 0);
  CHECK(w.eps > 0);
  CHECK(w.delta * w.inf_alpha1 - 2 * w.eps > 0);
  for (double x : l.points())
    CHECK(std::binary_search(w.regularization.lattice.points().begin(), w.regularization.lattice.points().end(), x));

  std::size_t originals = 0;
  for (const NodeResidual& r : w.residuals) {
    CHECK(r.abs_T == 0.0);
    CHECK(r.m > 0);
    CHECK(r.abs_Tprime > 0);
    if (r.original) ++originals;
  }
  CHECK(originals == l.size());
  CHECK(w.derivative_floor > 0);
  CHECK(std::isfinite(w.derivative_floor));

  // sandwich on the grid, recomputed here
  const GrowthFit& g = w.growth;
  for (std::size_t i = 0; i < w.grid.size(); ++i) {
    const double m = std::exp(w.log_m[i]);
    const double b = std::pow(bracket(w.grid[i]), g.N);
    CHECK(g.c / b <= m);
    CHECK(m <= g.C * b);
  }

  const TValue at = eval_T(w, 3 * kPi);
  CHECK(at.abs_T == 0.0);
  CHECK(at.note.find("|T'|") != std::string::npos);
  const TValue off = eval_T(w, 1.0);
  CHECK(off.abs_T > 0);
  CHECK(off.note.empty());
}

TEST_CASE("pi Z is refused at the density threshold") {
  CHECK(kind_of([] { (void)zero_set_pipeline(Symbol{}, progression(kPi, {-40, 40})); }) == ErrorKind::threshold);
}

TEST_CASE("pipeline errors") {
  CHECK(kind_of([] { (void)zero_set_pipeline(Symbol{}, Lattice(std::vector<double>{}, {-10, 10})); }) ==
        ErrorKind::size);
  CHECK(kind_of([] { (void)zero_set_pipeline(Symbol{}, Lattice({2.0, 5.0}, {1, 10})); }) == ErrorKind::window);
  ZeroSetConfig cfg;
  cfg.eps = 1.0;
  CHECK(kind_of([&] { (void)zero_set_pipeline(Symbol{}, progression(3 * kPi, {-40, 40}), cfg); }) ==
        ErrorKind::epsilon);
}

TEST_CASE("necessity certificate slopes") {
  const Interval win{-400, 400};
  const NecessityCertificate pi = necessity_certificate(Weight::linear(), progression(kPi, win), 0.5, 20);
  CHECK(std::abs(pi.slope - 1.0) <= 0.05);
  const NecessityCertificate half = necessity_certificate(Weight::linear(), progression(0.5 * kPi, win), 0.5, 20);
  CHECK(std::abs(half.slope - 3.0) <= 0.05);
  for (const NecessityRow& r : pi.rows) {
    CHECK(r.value > pi.delta * r.a);
    CHECK(r.value == doctest::Approx(kTwoPi * r.count - r.a));
  }
  CHECK(kind_of([&] { (void)necessity_certificate(Weight::linear(), progression(kTwoPi, win), 0.5, 20); }) ==
        ErrorKind::not_applicable);
  CHECK(kind_of([&] { (void)necessity_certificate(Weight::linear(), progression(kPi, win), 0.0, 20); }) ==
        ErrorKind::precondition);
}

TEST_CASE("growth fit") {
  std::vector<double> x, y;
  for (int i = -200; i <= 200; ++i) {
    x.push_back(i * 0.5);
    y.push_back(1.5 * std::log(bracket(i * 0.5)) + 0.2);
  }
  const GrowthFit g = fit_growth(x, y);
  CHECK(g.slope == doctest::Approx(1.5).epsilon(0.05));
  CHECK(g.N == 2.0);
  CHECK(g.c == doctest::Approx(std::exp(0.2)).epsilon(1e-10));

  const std::vector<double> flat(x.size(), 0.0);
  const GrowthFit f = fit_growth(x, flat);
  CHECK(f.N == 0.0);
  CHECK(f.c == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(f.C == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(kind_of([] { (void)fit_growth({}, {}); }) == ErrorKind::size);
}

TEST_CASE("modulus from phase") {
  // Q[1/(1+t²)] = x/(1+x²), so log m = -x/(2(1+x²)).
  std::vector<double> t, v;
  for (int i = 0; i <= 8000; ++i) {
    const double s = std::sinh(-8.0 + 16.0 * i / 8000);
    t.push_back(s);
    v.push_back(1 / (1 + s * s));
  }
  const SampledFunction lm = modulus_from_phase({SampledFunction(t, v)});
  for (std::size_t i = 0; i < t.size(); i += 500) {
    if (std::abs(t[i]) > 50) continue;
    CHECK(std::abs(lm.values()[i] + 0.5 * t[i] / (1 + t[i] * t[i])) <= 1e-4);
  }
  const std::vector<double> zeros(t.size(), 0.0);
  const SampledFunction sum = modulus_from_phase({SampledFunction(t, v), SampledFunction(t, zeros)});
  CHECK(sum.values() == lm.values());

  CHECK(kind_of([] { (void)modulus_from_phase({}); }) == ErrorKind::size);
  const SampledFunction a({0.0, 1.0}, {0.0, 0.0});
  const SampledFunction b({0.0, 2.0}, {0.0, 0.0});
  CHECK(kind_of([&] { (void)modulus_from_phase({a, b}); }) == ErrorKind::consistency);
  const SampledFunction grows({0.0, 1.0}, {0.0, 1.0}, GrowthClass::parse("log"));
  CHECK(kind_of([&] { (void)modulus_from_phase({grows}); }) == ErrorKind::precondition);
}

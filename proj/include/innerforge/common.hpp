#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace innerforge {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Failure categories. Each maps onto one CLI exit code (see exit_code()).
enum class ErrorKind {
  window,
  numeric,
  monotonicity,
  consistency,
  size,
  threshold,
  packing,
  singularity,
  accuracy,
  domain,
  tail,
  hypothesis,
  epsilon,
  precondition,
  verification,
  not_applicable,
  degenerate,
  redirect,
  io,
  usage,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying the failed check, and when meaningful the measured
/// value against its threshold.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<double> measured = std::nullopt,
        std::optional<double> threshold = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<double> measured() const noexcept { return measured_; }
  std::optional<double> threshold() const noexcept { return threshold_; }

  /// 3 for density-gate refusals, 4 for numeric/accuracy failures, 2 otherwise.
  int exit_code() const noexcept;

 private:
  ErrorKind kind_;
  std::optional<double> measured_;
  std::optional<double> threshold_;
};

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  bool bounded() const noexcept { return std::isfinite(lo) && std::isfinite(hi); }
  double length() const noexcept { return hi - lo; }
};

/// <x> = (1 + x^2)^(1/2)
inline double bracket(double x) noexcept { return std::hypot(1.0, x); }

/// Deterministic 64-bit generator (splitmix64). Used instead of the standard
/// distributions, whose output differs between library implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) noexcept { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

/// FNV-1a, used for input digests in certificates.
std::uint64_t fnv1a(std::string_view bytes) noexcept;
std::string hex_digest(std::uint64_t h);

/// Number of worker threads for grid evaluation; INNERFORGE_THREADS caps it.
unsigned worker_count();

/// Runs body(i) for i in [0, n). Every index is independent, so results do
/// not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Solves g(x) = target for increasing g on [lo, hi]: safeguarded Newton
/// when a derivative is supplied, plain bisection otherwise. Throws a window
/// error when target is not bracketed.
double invert_increasing(const std::function<double(double)>& g, double target, double lo,
                         double hi, const std::function<double(double)>& gprime = {},
                         double xtol = 1e-14, int max_iter = 200);

}  // namespace innerforge

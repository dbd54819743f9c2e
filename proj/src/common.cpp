#include "innerforge/common.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <thread>
#include <vector>

namespace innerforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::window: return "window";
    case ErrorKind::numeric: return "numeric";
    case ErrorKind::monotonicity: return "monotonicity";
    case ErrorKind::consistency: return "consistency";
    case ErrorKind::size: return "size";
    case ErrorKind::threshold: return "threshold";
    case ErrorKind::packing: return "packing";
    case ErrorKind::singularity: return "singularity";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::domain: return "domain";
    case ErrorKind::tail: return "tail";
    case ErrorKind::hypothesis: return "hypothesis";
    case ErrorKind::epsilon: return "epsilon";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::verification: return "verification";
    case ErrorKind::not_applicable: return "not-applicable";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::redirect: return "redirect";
    case ErrorKind::io: return "io";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what, std::optional<double> measured,
             std::optional<double> threshold)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + what),
      kind_(kind),
      measured_(measured),
      threshold_(threshold) {}

int Error::exit_code() const noexcept {
  switch (kind_) {
    case ErrorKind::threshold: return 3;
    case ErrorKind::accuracy:
    case ErrorKind::numeric: return 4;
    default: return 2;
  }
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("INNERFORGE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double invert_increasing(const std::function<double(double)>& g, double target, double lo,
                         double hi, const std::function<double(double)>& gprime, double xtol,
                         int max_iter) {
  const double glo = g(lo) - target;
  const double ghi = g(hi) - target;
  if (glo > 0 || ghi < 0)
    throw Error(ErrorKind::window, "target value outside the range of the increasing map", target);
  if (glo == 0) return lo;
  if (ghi == 0) return hi;
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter; ++it) {
    const double gx = g(x) - target;
    if (gx == 0) return x;
    if (gx < 0) {
      lo = x;
    } else {
      hi = x;
    }
    if (hi - lo <= xtol * std::max(1.0, std::abs(x))) return 0.5 * (lo + hi);
    double next = 0.5 * (lo + hi);
    if (gprime) {
      const double d = gprime(x);
      if (d > 0 && std::isfinite(d)) {
        const double newton = x - gx / d;
        if (newton > lo && newton < hi) {
          if (std::abs(newton - x) <= xtol * std::max(1.0, std::abs(x))) return newton;
          next = newton;
        }
      }
    }
    x = next;
  }
  return x;
}

}  // namespace innerforge

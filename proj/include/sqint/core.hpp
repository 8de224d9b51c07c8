#pragma once

// Shared vocabulary types and numeric helpers used by every sqint module.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace sqint {

using cplx = std::complex<double>;

/// A point of a chart on R^d.
using Point = std::vector<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Raised for malformed inputs (bad dimensions, grid mismatches, empty domains).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an algebraic consistency test fails (e.g. a section whose
/// cocycle leaves the subgroup).
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reduces an angle to (-pi, pi].
inline double wrap_phase(double phase) {
  double r = std::remainder(phase, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

/// Distance between two angles on the circle.
inline double phase_distance(double a, double b) { return std::abs(wrap_phase(a - b)); }

inline cplx unit(double phase) { return {std::cos(phase), std::sin(phase)}; }

template <class T>
double max_abs_diff(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) throw InvalidArgument("max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Pairwise summation: result depends only on the input order, never on how
// callers split the work.
template <class T>
T pairwise_sum(std::span<const T> v) {
  if (v.size() <= 16) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.first(h)) + pairwise_sum(v.subspan(h));
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(std::span<const T>(v));
}

/// Runs body(i) for i in [0, n) across hardware threads. Each index must
/// write only to its own output slot so results are order independent.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Deterministic random source; every randomized check takes an explicit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  Point uniform_point(const std::vector<std::pair<double, double>>& box) {
    Point p(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) p[i] = uniform(box[i].first, box[i].second);
    return p;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace sqint

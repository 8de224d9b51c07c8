#pragma once

// Thin FFTW3 wrapper: unnormalized complex transforms along one axis of a
// row-major array, with a process-wide plan cache.

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "sqint/core.hpp"

namespace sqint::fft {

namespace detail {

using Key = std::tuple<std::vector<std::size_t>, std::size_t, int>;

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const std::vector<std::size_t>& shape, std::size_t axis, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    Key key{shape, axis, sign};
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;

    std::size_t total = 1;
    for (auto s : shape) total *= s;
    std::size_t stride = 1;
    for (std::size_t i = axis + 1; i < shape.size(); ++i) stride *= shape[i];

    fftw_iodim dim{static_cast<int>(shape[axis]), static_cast<int>(stride), static_cast<int>(stride)};
    std::vector<fftw_iodim> loops;
    for (std::size_t i = 0; i < shape.size(); ++i) {
      if (i == axis) continue;
      std::size_t s = 1;
      for (std::size_t j = i + 1; j < shape.size(); ++j) s *= shape[j];
      loops.push_back({static_cast<int>(shape[i]), static_cast<int>(s), static_cast<int>(s)});
    }
    auto* scratch = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
    fftw_plan plan = fftw_plan_guru_dft(1, &dim, static_cast<int>(loops.size()), loops.data(), scratch, scratch,
                                        sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(scratch);
    if (plan == nullptr) throw InvalidArgument("fft: FFTW could not create a plan");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

}  // namespace detail

/// In place: data[j] <- sum_k data[k] exp(sign * 2 pi i j k / N) along `axis`.
inline void transform_axis(std::vector<cplx>& data, const std::vector<std::size_t>& shape, std::size_t axis,
                           int sign) {
  if (axis >= shape.size()) throw InvalidArgument("fft: axis out of range");
  fftw_plan plan = detail::PlanCache::instance().get(shape, axis, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
}

inline void forward(std::vector<cplx>& data, const std::vector<std::size_t>& shape, std::size_t axis) {
  transform_axis(data, shape, axis, -1);
}

inline void backward(std::vector<cplx>& data, const std::vector<std::size_t>& shape, std::size_t axis) {
  transform_axis(data, shape, axis, +1);
}

/// Signed DFT index of bin k for an N-point transform, in [-N/2, N/2).
inline long signed_index(std::size_t k, std::size_t N) {
  const long kk = static_cast<long>(k), NN = static_cast<long>(N);
  return kk < (NN + 1) / 2 ? kk : kk - NN;
}

}  // namespace sqint::fft

#pragma once

// Sampled vectors of L^2(R^n) on uniform grids, their inner product, and the
// band-limited translation, modulation and Fourier-Plancherel operators.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sqint/core.hpp"
#include "sqint/fft.hpp"

namespace sqint {

/// Uniform grid, sample j on an axis sits at offset + j * spacing. Row-major, last axis fastest.
struct StateGrid {
  std::vector<double> offset;
  std::vector<double> spacing;
  std::vector<std::size_t> count;

  std::size_t rank() const { return count.size(); }

  std::size_t size() const {
    std::size_t s = 1;
    for (auto c : count) s *= c;
    return s;
  }

  double cell_volume() const {
    double v = 1.0;
    for (double h : spacing) v *= h;
    return v;
  }

  double coord(std::size_t axis, std::size_t j) const { return offset[axis] + static_cast<double>(j) * spacing[axis]; }

  double length(std::size_t axis) const { return static_cast<double>(count[axis]) * spacing[axis]; }

  /// Angular DFT frequency of bin k on `axis`: 2 pi k~ / (N h), k~ in [-N/2, N/2).
  double frequency(std::size_t axis, std::size_t k) const {
    return two_pi * static_cast<double>(fft::signed_index(k, count[axis])) / length(axis);
  }

  double nyquist(std::size_t axis) const { return pi / spacing[axis]; }

  std::size_t stride(std::size_t axis) const {
    std::size_t s = 1;
    for (std::size_t i = axis + 1; i < rank(); ++i) s *= count[i];
    return s;
  }

  std::vector<std::size_t> unflatten(std::size_t flat) const {
    std::vector<std::size_t> idx(rank());
    for (std::size_t ax = rank(); ax-- > 0;) {
      idx[ax] = flat % count[ax];
      flat /= count[ax];
    }
    return idx;
  }

  Point point(std::size_t flat) const {
    const auto idx = unflatten(flat);
    Point x(rank());
    for (std::size_t ax = 0; ax < rank(); ++ax) x[ax] = coord(ax, idx[ax]);
    return x;
  }

  bool operator==(const StateGrid&) const = default;
};

/// Grid on [lo, hi) per axis with the first sample at lo (periodic layout).
inline StateGrid periodic_grid(const std::vector<std::pair<double, double>>& box, const std::vector<std::size_t>& count) {
  if (box.size() != count.size() || box.empty()) throw InvalidArgument("periodic_grid: rank mismatch");
  StateGrid g;
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (count[i] < 2 || !(box[i].second > box[i].first)) throw InvalidArgument("periodic_grid: empty axis");
    const double h = (box[i].second - box[i].first) / static_cast<double>(count[i]);
    g.offset.push_back(box[i].first);
    g.spacing.push_back(h);
  }
  g.count = count;
  return g;
}

/// Grid on [lo, hi) per axis with samples at cell midpoints (never on lo itself).
inline StateGrid midpoint_grid(const std::vector<std::pair<double, double>>& box, const std::vector<std::size_t>& count) {
  StateGrid g = periodic_grid(box, count);
  for (std::size_t i = 0; i < g.rank(); ++i) g.offset[i] += 0.5 * g.spacing[i];
  return g;
}

class DiscretizedState {
 public:
  DiscretizedState() = default;
  explicit DiscretizedState(StateGrid grid) : grid_(std::move(grid)), samples_(grid_.size()) {}
  DiscretizedState(StateGrid grid, std::vector<cplx> samples) : grid_(std::move(grid)), samples_(std::move(samples)) {
    if (samples_.size() != grid_.size()) throw InvalidArgument("DiscretizedState: sample count differs from grid size");
  }

  const StateGrid& grid() const { return grid_; }
  const std::vector<cplx>& samples() const { return samples_; }
  std::vector<cplx>& samples() { return samples_; }
  std::size_t size() const { return samples_.size(); }
  cplx operator[](std::size_t i) const { return samples_[i]; }
  cplx& operator[](std::size_t i) { return samples_[i]; }

  double norm_sq() const {
    std::vector<double> t(samples_.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(samples_[i]);
    return pairwise_sum(t) * grid_.cell_volume();
  }
  double norm() const { return std::sqrt(norm_sq()); }

  DiscretizedState& operator+=(const DiscretizedState& o) {
    require_compatible(o, "operator+=");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += o.samples_[i];
    return *this;
  }
  DiscretizedState& operator-=(const DiscretizedState& o) {
    require_compatible(o, "operator-=");
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= o.samples_[i];
    return *this;
  }
  DiscretizedState& operator*=(cplx c) {
    for (auto& v : samples_) v *= c;
    return *this;
  }

  void require_compatible(const DiscretizedState& o, const char* what) const {
    if (!(grid_ == o.grid_)) throw InvalidArgument(std::string(what) + ": incompatible state grids");
  }

 private:
  StateGrid grid_;
  std::vector<cplx> samples_;
};

inline DiscretizedState operator+(DiscretizedState a, const DiscretizedState& b) { return a += b; }
inline DiscretizedState operator-(DiscretizedState a, const DiscretizedState& b) { return a -= b; }
inline DiscretizedState operator*(cplx c, DiscretizedState a) { return a *= c; }

/// <phi, psi> = sum conj(phi_i) psi_i * cell volume; linear in the second argument.
inline cplx inner(const DiscretizedState& phi, const DiscretizedState& psi) {
  phi.require_compatible(psi, "inner");
  std::vector<cplx> t(phi.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(phi[i]) * psi[i];
  return pairwise_sum(t) * phi.grid().cell_volume();
}

inline double distance(const DiscretizedState& a, const DiscretizedState& b) { return (a - b).norm(); }

inline DiscretizedState sample(const StateGrid& grid, const std::function<cplx(const Point&)>& f) {
  DiscretizedState s(grid);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = f(grid.point(i));
  return s;
}

inline DiscretizedState normalized(DiscretizedState s) {
  const double n = s.norm();
  if (!(n > 0.0)) throw InvalidArgument("normalized: zero state");
  return (1.0 / n) * std::move(s);
}

// --- band-limited operators --------------------------------------------------

/// Multiplies by exp(i p.x).
inline DiscretizedState modulate(DiscretizedState f, const Point& p) {
  const auto& g = f.grid();
  if (p.size() != g.rank()) throw InvalidArgument("modulate: rank mismatch");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto idx = g.unflatten(i);
    double ph = 0.0;
    for (std::size_t ax = 0; ax < g.rank(); ++ax) ph += p[ax] * g.coord(ax, idx[ax]);
    f[i] *= unit(ph);
  }
  return f;
}

/// Applies exp(i * phase(omega_k)) along one axis in the DFT domain.
inline void spectral_phase_axis(std::vector<cplx>& data, const StateGrid& g, std::size_t axis,
                                const std::function<cplx(double)>& factor) {
  fft::forward(data, g.count, axis);
  const std::size_t N = g.count[axis], stride = g.stride(axis);
  std::vector<cplx> fac(N);
  for (std::size_t k = 0; k < N; ++k) fac[k] = factor(g.frequency(axis, k)) / static_cast<double>(N);
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= fac[(i / stride) % N];
  fft::backward(data, g.count, axis);
}

/// (T_d f)(x) = f(x - d) by an FFT phase ramp (band-limited, periodic on the grid box).
inline DiscretizedState translate(DiscretizedState f, const Point& d) {
  const auto g = f.grid();
  if (d.size() != g.rank()) throw InvalidArgument("translate: rank mismatch");
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    if (d[ax] == 0.0) continue;
    const double dd = d[ax];
    spectral_phase_axis(f.samples(), g, ax, [dd](double w) { return unit(-w * dd); });
  }
  return f;
}

/// Translation along a single axis.
inline DiscretizedState translate_axis(DiscretizedState f, std::size_t axis, double d) {
  if (d == 0.0) return f;
  const auto g = f.grid();
  spectral_phase_axis(f.samples(), g, axis, [d](double w) { return unit(-w * d); });
  return f;
}

/// Grid of the Fourier-Plancherel image: spacing 2 pi/(N h), centered frequency layout.
inline StateGrid fourier_grid(const StateGrid& g) {
  StateGrid out;
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    const double dxi = two_pi / g.length(ax);
    out.spacing.push_back(dxi);
    out.offset.push_back(-static_cast<double>(g.count[ax] / 2) * dxi);
  }
  out.count = g.count;
  return out;
}

/// Symmetric grid whose Fourier grid coincides with itself: h = sqrt(2 pi / N).
inline StateGrid self_dual_grid(std::size_t rank, std::size_t N) {
  const double h = std::sqrt(two_pi / static_cast<double>(N));
  StateGrid g;
  for (std::size_t ax = 0; ax < rank; ++ax) {
    g.spacing.push_back(h);
    g.offset.push_back(-static_cast<double>(N / 2) * h);
    g.count.push_back(N);
  }
  return g;
}

namespace detail {

// (F f)(xi_m) = (2 pi)^{-n/2} sum_j exp(sign i xi_m x_j) f_j h, per axis.
inline DiscretizedState fourier_impl(const DiscretizedState& f, const StateGrid& in, const StateGrid& out, int sign) {
  std::vector<cplx> data = f.samples();
  for (std::size_t ax = 0; ax < in.rank(); ++ax) {
    const std::size_t N = in.count[ax], stride = in.stride(ax);
    const double x0 = in.offset[ax], h = in.spacing[ax], xi0 = out.offset[ax], dxi = out.spacing[ax];
    std::vector<cplx> pre(N), post(N);
    for (std::size_t j = 0; j < N; ++j) pre[j] = unit(sign * xi0 * static_cast<double>(j) * h);
    for (std::size_t m = 0; m < N; ++m) {
      post[m] = unit(sign * (xi0 * x0 + static_cast<double>(m) * dxi * x0)) * h / std::sqrt(two_pi);
    }
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= pre[(i / stride) % N];
    fft::transform_axis(data, in.count, ax, sign);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= post[(i / stride) % N];
  }
  return {out, std::move(data)};
}

}  // namespace detail

/// Unitary Fourier-Plancherel operator, (F f)(xi) = (2 pi)^{-n/2} int exp(i xi.x) f(x) dx.
inline DiscretizedState fourier_plancherel(const DiscretizedState& f) {
  return detail::fourier_impl(f, f.grid(), fourier_grid(f.grid()), +1);
}

/// Inverse of fourier_plancherel; `target` is the original spatial grid.
inline DiscretizedState inverse_fourier_plancherel(const DiscretizedState& F, const StateGrid& target) {
  if (!(fourier_grid(target) == F.grid())) throw InvalidArgument("inverse_fourier_plancherel: grid mismatch");
  return detail::fourier_impl(F, F.grid(), target, -1);
}

/// DFT spectrum with continuum scaling: S_k = h^n sum_j f_j exp(-i omega_k.x_j), FFT bin order.
inline std::vector<cplx> spectrum(const DiscretizedState& f) {
  const auto& g = f.grid();
  std::vector<cplx> data = f.samples();
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    const std::size_t N = g.count[ax], stride = g.stride(ax);
    fft::forward(data, g.count, ax);
    std::vector<cplx> fac(N);
    for (std::size_t k = 0; k < N; ++k) fac[k] = unit(-g.frequency(ax, k) * g.offset[ax]) * g.spacing[ax];
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= fac[(i / stride) % N];
  }
  return data;
}

/// Inverse of spectrum(): f_j = L^-n sum_k S_k exp(i omega_k.x_j).
inline DiscretizedState from_spectrum(const StateGrid& g, std::vector<cplx> data) {
  if (data.size() != g.size()) throw InvalidArgument("from_spectrum: size mismatch");
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    const std::size_t N = g.count[ax], stride = g.stride(ax);
    std::vector<cplx> fac(N);
    for (std::size_t k = 0; k < N; ++k) fac[k] = unit(g.frequency(ax, k) * g.offset[ax]) / g.length(ax);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= fac[(i / stride) % N];
    fft::backward(data, g.count, ax);
  }
  return {g, std::move(data)};
}

/// Fraction of the spectral energy at |omega| > cutoff on any axis.
inline double spectral_tail(const DiscretizedState& f, double cutoff) {
  const auto S = spectrum(f);
  const auto& g = f.grid();
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    const auto idx = g.unflatten(i);
    double w = 0.0;
    for (std::size_t ax = 0; ax < g.rank(); ++ax) w = std::max(w, std::abs(g.frequency(ax, idx[ax])));
    total += std::norm(S[i]);
    if (w > cutoff) tail += std::norm(S[i]);
  }
  return total > 0.0 ? tail / total : 0.0;
}

/// Fraction of the energy with |x - center| > radius on any axis.
inline double spatial_tail(const DiscretizedState& f, const Point& center, double radius) {
  const auto& g = f.grid();
  double tail = 0.0, total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Point x = g.point(i);
    double r = 0.0;
    for (std::size_t ax = 0; ax < g.rank(); ++ax) r = std::max(r, std::abs(x[ax] - center[ax]));
    total += std::norm(f[i]);
    if (r > radius) tail += std::norm(f[i]);
  }
  return total > 0.0 ? tail / total : 0.0;
}

// --- analytic test vectors ----------------------------------------------------

/// Normalized coherent state (pi sigma^2)^{-n/4} exp(-|x-c|^2/(2 sigma^2) + i p.(x - c)).
inline DiscretizedState gaussian(const StateGrid& grid, const Point& center = {}, const Point& momentum = {},
                                 double sigma = 1.0) {
  const std::size_t n = grid.rank();
  const Point c = center.empty() ? Point(n, 0.0) : center;
  const Point p = momentum.empty() ? Point(n, 0.0) : momentum;
  const double norm = std::pow(pi * sigma * sigma, -0.25 * static_cast<double>(n));
  return sample(grid, [&](const Point& x) {
    double r2 = 0.0, ph = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r2 += (x[i] - c[i]) * (x[i] - c[i]);
      ph += p[i] * (x[i] - c[i]);
    }
    return norm * std::exp(-r2 / (2.0 * sigma * sigma)) * unit(ph);
  });
}

/// L^2-normalized Hermite function h_k(x) of unit width (one dimension).
inline double hermite_function(unsigned k, double x) {
  double h0 = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
  if (k == 0) return h0;
  double h1 = std::sqrt(2.0) * x * h0;
  for (unsigned j = 1; j < k; ++j) {
    const double h2 = std::sqrt(2.0 / (j + 1.0)) * x * h1 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// Tensor product of Hermite functions, one order per axis, centered at `center`.
inline DiscretizedState hermite(const StateGrid& grid, const std::vector<unsigned>& orders, const Point& center = {}) {
  const std::size_t n = grid.rank();
  if (orders.size() != n) throw InvalidArgument("hermite: one order per axis required");
  const Point c = center.empty() ? Point(n, 0.0) : center;
  return sample(grid, [&](const Point& x) {
    double v = 1.0;
    for (std::size_t i = 0; i < n; ++i) v *= hermite_function(orders[i], x[i] - c[i]);
    return cplx(v);
  });
}

/// Real, even, zero-mean Morlet wavelet (cos(w0 x) - exp(-w0^2/2)) exp(-x^2/2), normalized on the grid.
inline DiscretizedState morlet(const StateGrid& grid, double omega0 = 5.0, double sigma = 1.0) {
  if (grid.rank() != 1) throw InvalidArgument("morlet: one-dimensional grid required");
  const double corr = std::exp(-0.5 * omega0 * omega0);
  return normalized(sample(grid, [&](const Point& x) {
    const double u = x[0] / sigma;
    return cplx((std::cos(omega0 * u) - corr) * std::exp(-0.5 * u * u));
  }));
}

/// Mexican hat (1 - x^2) exp(-x^2/2), normalized on the grid.
inline DiscretizedState mexican_hat(const StateGrid& grid, double sigma = 1.0) {
  if (grid.rank() != 1) throw InvalidArgument("mexican_hat: one-dimensional grid required");
  return normalized(sample(grid, [&](const Point& x) {
    const double u = x[0] / sigma;
    return cplx((1.0 - u * u) * std::exp(-0.5 * u * u));
  }));
}

/// Real zero-mean packet (cos(w (x - c)) - exp(-w^2 sigma^2/2)) exp(-(x - c)^2/(2 sigma^2)), normalized.
inline DiscretizedState wave_packet(const StateGrid& grid, double center, double freq, double sigma = 1.0) {
  if (grid.rank() != 1) throw InvalidArgument("wave_packet: one-dimensional grid required");
  const double corr = std::exp(-0.5 * freq * freq * sigma * sigma);
  return normalized(sample(grid, [&](const Point& x) {
    const double u = (x[0] - center) / sigma;
    return cplx((std::cos(freq * sigma * u) - corr) * std::exp(-0.5 * u * u));
  }));
}

}  // namespace sqint

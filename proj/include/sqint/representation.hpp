#pragma once

// Unitary and projective representations acting on sampled states: the
// Weyl-Heisenberg representations U_k, the affine (wavelet) representation,
// the exotic-group representation, section pullbacks and central-extension lifts.

#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sqint/group.hpp"
#include "sqint/multiplier.hpp"
#include "sqint/state.hpp"

namespace sqint {

inline constexpr double unbounded = std::numeric_limits<double>::infinity();

class Representation {
 public:
  virtual ~Representation() = default;

  virtual std::string label() const = 0;
  virtual const Group& group() const = 0;

  /// Throws InvalidArgument when the state lives on a grid the action cannot use.
  virtual void validate_state(const DiscretizedState&) const {}

  virtual DiscretizedState apply(const Point& g, const DiscretizedState& f) const = 0;

  /// The inverse operator of apply(g); differs from apply(g^-1) by a phase for projective actions.
  virtual DiscretizedState apply_inverse(const Point& g, const DiscretizedState& f) const {
    return apply(group()->inverse(g), f);
  }

  /// Parameter box on which the discretized action stays accurate for `psi`.
  virtual Box safe_box(const DiscretizedState& psi) const = 0;

  /// c(g) = <U(g) psi, phi> at every node; results do not depend on evaluation order.
  virtual std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                         const std::vector<Point>& nodes) const {
    return coefficients_generic(psi, phi, nodes);
  }

  /// sum_i w_i U(g_i) psi.
  virtual DiscretizedState superpose(const DiscretizedState& psi, const std::vector<cplx>& weights,
                                     const std::vector<Point>& nodes) const {
    return superpose_generic(psi, weights, nodes);
  }

  cplx coefficient(const DiscretizedState& psi, const DiscretizedState& phi, const Point& g) const {
    psi.require_compatible(phi, "coefficient");
    return inner(apply(g, psi), phi);
  }

  std::vector<cplx> coefficients_generic(const DiscretizedState& psi, const DiscretizedState& phi,
                                         const std::vector<Point>& nodes) const {
    psi.require_compatible(phi, "coefficients");
    validate_state(psi);
    std::vector<cplx> out(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { out[i] = inner(apply(nodes[i], psi), phi); });
    return out;
  }

  DiscretizedState superpose_generic(const DiscretizedState& psi, const std::vector<cplx>& weights,
                                     const std::vector<Point>& nodes) const {
    if (weights.size() != nodes.size()) throw InvalidArgument("superpose: weight/node count mismatch");
    validate_state(psi);
    constexpr std::size_t chunk = 64;
    const std::size_t chunks = (nodes.size() + chunk - 1) / chunk;
    std::vector<DiscretizedState> partial(chunks, DiscretizedState(psi.grid()));
    parallel_for(chunks, [&](std::size_t c) {
      for (std::size_t i = c * chunk; i < std::min(nodes.size(), (c + 1) * chunk); ++i) {
        if (weights[i] == cplx{}) continue;
        partial[c] += weights[i] * apply(nodes[i], psi);
      }
    });
    DiscretizedState out(psi.grid());
    for (auto& p : partial) out += p;
    return out;
  }
};

using Rep = std::shared_ptr<const Representation>;

namespace detail {

/// Groups node indices by the values of selected coordinates (ordered, deterministic).
inline std::map<Point, std::vector<std::size_t>> group_nodes(const std::vector<Point>& nodes,
                                                             const std::vector<std::size_t>& axes) {
  std::map<Point, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Point key(axes.size());
    for (std::size_t j = 0; j < axes.size(); ++j) key[j] = nodes[i][axes[j]];
    groups[key].push_back(i);
  }
  return groups;
}

/// Smallest radius (multiple of the spacing) with spatial energy fraction outside below tol.
inline double support_radius(const DiscretizedState& f, double tol) {
  const auto& g = f.grid();
  Point center(g.rank());
  for (std::size_t ax = 0; ax < g.rank(); ++ax) center[ax] = g.offset[ax] + 0.5 * (g.length(ax) - g.spacing[ax]);
  double r = 0.0, rmax = 0.0, h = unbounded;
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    rmax = std::max(rmax, 0.5 * g.length(ax));
    h = std::min(h, g.spacing[ax]);
  }
  while (r < rmax && spatial_tail(f, center, r) > tol) r += h;
  return r;
}

/// Smallest angular frequency with spectral energy fraction above it below tol.
inline double band_radius(const DiscretizedState& f, double tol) {
  const auto& g = f.grid();
  double w = 0.0, wmax = 0.0, dw = unbounded;
  for (std::size_t ax = 0; ax < g.rank(); ++ax) {
    wmax = std::max(wmax, g.nyquist(ax));
    dw = std::min(dw, two_pi / g.length(ax));
  }
  while (w < wmax && spectral_tail(f, w) > tol) w += dw;
  return w;
}

inline constexpr double safe_tol = 1e-12;

}  // namespace detail

// --- Weyl-Heisenberg ----------------------------------------------------------

/// (U(k, p, q) f)(x) = exp(i(k kcheck + p.x)) f(x + kcheck q) on L^2(R^n).
class WhRep : public Representation {
 public:
  WhRep(std::size_t n, double kcheck) : n_(n), kcheck_(kcheck), group_(make_polarized_wh(n)) {
    if (kcheck == 0.0) throw InvalidArgument("wh_rep: kcheck must be nonzero (the orbit of kcheck = 0 is a point)");
  }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "wh_rep(n=" << n_ << ", kcheck=" << kcheck_ << ")";
    return os.str();
  }
  const Group& group() const override { return group_; }
  double kcheck() const { return kcheck_; }

  void validate_state(const DiscretizedState& f) const override {
    if (f.grid().rank() != n_) throw InvalidArgument("wh_rep: state rank differs from n");
  }

  DiscretizedState apply(const Point& g, const DiscretizedState& f) const override {
    validate_state(f);
    DiscretizedState out = translate(f, shift_for(g));
    return modulate_with_phase(std::move(out), g);
  }

  Box safe_box(const DiscretizedState& psi) const override {
    validate_state(psi);
    const double rx = detail::support_radius(psi, detail::safe_tol);
    const double rw = detail::band_radius(psi, detail::safe_tol);
    Box box{{-unbounded, unbounded}};
    for (std::size_t i = 0; i < n_; ++i) {
      const double pm = std::max(0.0, psi.grid().nyquist(i) - rw);
      box.push_back({-pm, pm});
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const double qm = std::max(0.0, 0.5 * psi.grid().length(i) - rx) / std::abs(kcheck_);
      box.push_back({-qm, qm});
    }
    return box;
  }

  std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                 const std::vector<Point>& nodes) const override {
    psi.require_compatible(phi, "coefficients");
    validate_state(psi);
    const auto& grid = psi.grid();
    std::vector<std::size_t> q_axes;
    for (std::size_t i = 0; i < n_; ++i) q_axes.push_back(1 + n_ + i);
    const auto groups = detail::group_nodes(nodes, q_axes);
    std::vector<const std::vector<std::size_t>*> members;
    std::vector<Point> keys;
    for (const auto& [q, idx] : groups) {
      keys.push_back(q);
      members.push_back(&idx);
    }
    std::vector<cplx> out(nodes.size());
    const double vol = grid.cell_volume();
    parallel_for(keys.size(), [&](std::size_t gi) {
      Point shift(n_);
      for (std::size_t i = 0; i < n_; ++i) shift[i] = -kcheck_ * keys[gi][i];
      const DiscretizedState shifted = translate(psi, shift);
      std::vector<cplx> prod(grid.size());
      for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = std::conj(shifted[j]) * phi[j] * vol;
      std::vector<cplx> terms(grid.size());
      for (std::size_t idx : *members[gi]) {
        const Point& g = nodes[idx];
        const auto ramps = axis_ramps(grid, g, -1.0);
        for (std::size_t j = 0; j < prod.size(); ++j) terms[j] = prod[j] * ramp_at(grid, ramps, j);
        out[idx] = unit(-kcheck_ * g[0]) * pairwise_sum(terms);
      }
    });
    return out;
  }

  DiscretizedState superpose(const DiscretizedState& psi, const std::vector<cplx>& weights,
                             const std::vector<Point>& nodes) const override {
    if (weights.size() != nodes.size()) throw InvalidArgument("superpose: weight/node count mismatch");
    validate_state(psi);
    const auto& grid = psi.grid();
    std::vector<std::size_t> q_axes;
    for (std::size_t i = 0; i < n_; ++i) q_axes.push_back(1 + n_ + i);
    const auto groups = detail::group_nodes(nodes, q_axes);
    std::vector<Point> keys;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [q, idx] : groups) {
      keys.push_back(q);
      members.push_back(&idx);
    }
    std::vector<DiscretizedState> partial(keys.size(), DiscretizedState(grid));
    parallel_for(keys.size(), [&](std::size_t gi) {
      std::vector<cplx> envelope(grid.size());
      for (std::size_t idx : *members[gi]) {
        if (weights[idx] == cplx{}) continue;
        const Point& g = nodes[idx];
        const auto ramps = axis_ramps(grid, g, +1.0);
        const cplx c = weights[idx] * unit(kcheck_ * g[0]);
        for (std::size_t j = 0; j < envelope.size(); ++j) envelope[j] += c * ramp_at(grid, ramps, j);
      }
      Point shift(n_);
      for (std::size_t i = 0; i < n_; ++i) shift[i] = -kcheck_ * keys[gi][i];
      const DiscretizedState shifted = translate(psi, shift);
      for (std::size_t j = 0; j < envelope.size(); ++j) partial[gi][j] = envelope[j] * shifted[j];
    });
    DiscretizedState out(grid);
    for (auto& p : partial) out += p;
    return out;
  }

 private:
  Point shift_for(const Point& g) const {
    Point d(n_);
    for (std::size_t i = 0; i < n_; ++i) d[i] = -kcheck_ * g[1 + n_ + i];
    return d;
  }

  DiscretizedState modulate_with_phase(DiscretizedState f, const Point& g) const {
    Point p(g.begin() + 1, g.begin() + 1 + static_cast<long>(n_));
    f = modulate(std::move(f), p);
    return unit(kcheck_ * g[0]) * std::move(f);
  }

  // Per-axis tables of exp(sign i p_ax x_ax).
  std::vector<std::vector<cplx>> axis_ramps(const StateGrid& grid, const Point& g, double sign) const {
    std::vector<std::vector<cplx>> ramps(n_);
    for (std::size_t ax = 0; ax < n_; ++ax) {
      ramps[ax].resize(grid.count[ax]);
      for (std::size_t j = 0; j < grid.count[ax]; ++j) ramps[ax][j] = unit(sign * g[1 + ax] * grid.coord(ax, j));
    }
    return ramps;
  }

  static cplx ramp_at(const StateGrid& grid, const std::vector<std::vector<cplx>>& ramps, std::size_t flat) {
    cplx v = 1.0;
    for (std::size_t ax = grid.rank(); ax-- > 0;) {
      v *= ramps[ax][flat % grid.count[ax]];
      flat /= grid.count[ax];
    }
    return v;
  }

  std::size_t n_;
  double kcheck_;
  Group group_;
};

inline std::shared_ptr<const WhRep> wh_rep(std::size_t n, double kcheck) { return std::make_shared<WhRep>(n, kcheck); }

/// D(q, p) f(x) = exp(-i p.q/2) exp(i p.x) f(x - q).
inline DiscretizedState displacement(const Point& q, const Point& p, const DiscretizedState& f) {
  if (q.size() != f.grid().rank() || p.size() != f.grid().rank()) throw InvalidArgument("displacement: rank mismatch");
  double pq = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) pq += p[i] * q[i];
  return unit(-0.5 * pq) * modulate(translate(f, q), p);
}

// --- affine -------------------------------------------------------------------

/// (U(b, a) f)(x) = a^{-n/2} f((x - b)/a), realized spectrally:
/// (U f)^(w) = a^{n/2} exp(-i w.b) f^(a w), with f^ the DTFT of the samples
/// restricted to the grid band. The result is the band-limited projection.
class AffineRep : public Representation {
 public:
  explicit AffineRep(std::size_t n) : n_(n), group_(make_affine(n)) {}

  std::string label() const override { return "affine_rep(n=" + std::to_string(n_) + ")"; }
  const Group& group() const override { return group_; }

  void validate_state(const DiscretizedState& f) const override {
    if (f.grid().rank() != n_) throw InvalidArgument("affine_rep: state rank differs from n");
  }

  DiscretizedState apply(const Point& g, const DiscretizedState& f) const override {
    validate_state(f);
    require_scale(g[n_]);
    auto S = dilated_spectrum(f, g[n_]);
    const auto& grid = f.grid();
    const double amp = std::pow(g[n_], 0.5 * static_cast<double>(n_));
    for (std::size_t i = 0; i < S.size(); ++i) S[i] *= amp * spectral_ramp(grid, g, i, -1.0);
    return from_spectrum(grid, std::move(S));
  }

  Box safe_box(const DiscretizedState& psi) const override {
    validate_state(psi);
    const auto& grid = psi.grid();
    Box box;
    double hmin = unbounded, lmin = unbounded;
    for (std::size_t ax = 0; ax < n_; ++ax) {
      box.push_back({grid.offset[ax], grid.offset[ax] + grid.length(ax)});
      hmin = std::min(hmin, grid.spacing[ax]);
      lmin = std::min(lmin, grid.length(ax));
    }
    box.push_back({hmin / 8.0, lmin / 8.0});
    return box;
  }

  /// f^(a w_k) for every DFT bin k, zero where a w_k lies beyond the grid band.
  std::vector<cplx> dilated_spectrum(const DiscretizedState& f, double a) const {
    const auto& grid = f.grid();
    std::vector<cplx> data = f.samples();
    for (std::size_t ax = 0; ax < n_; ++ax) {
      const std::size_t N = grid.count[ax], stride = grid.stride(ax);
      const double band = grid.nyquist(ax) * (1.0 + 1e-12);
      std::vector<cplx> M(N * N);
      for (std::size_t k = 0; k < N; ++k) {
        const double xi = a * grid.frequency(ax, k);
        if (std::abs(xi) > band) continue;
        for (std::size_t j = 0; j < N; ++j) M[k * N + j] = unit(-xi * grid.coord(ax, j)) * grid.spacing[ax];
      }
      std::vector<cplx> next(data.size());
      const std::size_t outer = data.size() / (N * stride);
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t s = 0; s < stride; ++s) {
          const std::size_t base = o * N * stride + s;
          for (std::size_t k = 0; k < N; ++k) {
            cplx acc = 0.0;
            for (std::size_t j = 0; j < N; ++j) acc += M[k * N + j] * data[base + j * stride];
            next[base + k * stride] = acc;
          }
        }
      }
      data = std::move(next);
    }
    return data;
  }

  std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                 const std::vector<Point>& nodes) const override {
    psi.require_compatible(phi, "coefficients");
    validate_state(psi);
    const auto& grid = psi.grid();
    const auto Phi = spectrum(phi);
    double L = 1.0;
    for (std::size_t ax = 0; ax < n_; ++ax) L *= grid.length(ax);
    const auto groups = detail::group_nodes(nodes, {n_});
    std::vector<double> scales;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [a, idx] : groups) {
      scales.push_back(a[0]);
      members.push_back(&idx);
    }
    std::vector<cplx> out(nodes.size());
    parallel_for(scales.size(), [&](std::size_t gi) {
      const double a = scales[gi];
      require_scale(a);
      auto T = dilated_spectrum(psi, a);
      const double amp = std::pow(a, 0.5 * static_cast<double>(n_)) / L;
      for (std::size_t k = 0; k < T.size(); ++k) T[k] = amp * std::conj(T[k]) * Phi[k];
      std::vector<cplx> terms(T.size());
      for (std::size_t idx : *members[gi]) {
        for (std::size_t k = 0; k < T.size(); ++k) terms[k] = T[k] * spectral_ramp(grid, nodes[idx], k, +1.0);
        out[idx] = pairwise_sum(terms);
      }
    });
    return out;
  }

  DiscretizedState superpose(const DiscretizedState& psi, const std::vector<cplx>& weights,
                             const std::vector<Point>& nodes) const override {
    if (weights.size() != nodes.size()) throw InvalidArgument("superpose: weight/node count mismatch");
    validate_state(psi);
    const auto& grid = psi.grid();
    const auto groups = detail::group_nodes(nodes, {n_});
    std::vector<double> scales;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [a, idx] : groups) {
      scales.push_back(a[0]);
      members.push_back(&idx);
    }
    std::vector<std::vector<cplx>> partial(scales.size());
    parallel_for(scales.size(), [&](std::size_t gi) {
      const double a = scales[gi];
      require_scale(a);
      const auto D = dilated_spectrum(psi, a);
      const double amp = std::pow(a, 0.5 * static_cast<double>(n_));
      std::vector<cplx> env(D.size());
      for (std::size_t idx : *members[gi]) {
        if (weights[idx] == cplx{}) continue;
        for (std::size_t k = 0; k < env.size(); ++k) env[k] += weights[idx] * spectral_ramp(grid, nodes[idx], k, -1.0);
      }
      partial[gi].resize(D.size());
      for (std::size_t k = 0; k < D.size(); ++k) partial[gi][k] = amp * env[k] * D[k];
    });
    std::vector<cplx> S(grid.size());
    for (const auto& p : partial) {
      for (std::size_t k = 0; k < S.size(); ++k) S[k] += p[k];
    }
    return from_spectrum(grid, std::move(S));
  }

 private:
  static void require_scale(double a) {
    if (!(a > 0.0)) throw InvalidArgument("affine_rep: scale a must be positive");
  }

  // exp(sign i w_k . b) for flat spectral index k.
  cplx spectral_ramp(const StateGrid& grid, const Point& g, std::size_t flat, double sign) const {
    double ph = 0.0;
    for (std::size_t ax = n_; ax-- > 0;) {
      ph += grid.frequency(ax, flat % grid.count[ax]) * g[ax];
      flat /= grid.count[ax];
    }
    return unit(sign * ph);
  }

  std::size_t n_;
  Group group_;
};

inline std::shared_ptr<const AffineRep> affine_rep(std::size_t n) { return std::make_shared<AffineRep>(n); }

// --- exotic group -------------------------------------------------------------

/// (U(t,s,b,p,q,r,a) f)(bc, pc) = a^{1/2} exp(i(t + k.r)) exp(i(b bc + p.pc)) f(a bc, pc + q)
/// on L^2(R+ x R^n, dbc dpc). Axis 0 of the state grid is bc, sampled at
/// midpoints (j + 1/2) h; dilation uses the odd sine-series interpolant.
class ExoticRep : public Representation {
 public:
  ExoticRep(std::size_t n, Point kvec) : n_(n), kvec_(std::move(kvec)), group_(make_exotic(n)) {
    if (kvec_.empty()) kvec_.assign(n, 0.0);
    if (kvec_.size() != n) throw InvalidArgument("exotic_rep: k vector must have n entries");
  }

  std::string label() const override {
    std::ostringstream os;
    os.precision(17);
    os << "exotic_rep(n=" << n_ << ", k=[";
    for (std::size_t i = 0; i < n_; ++i) os << (i ? "," : "") << kvec_[i];
    os << "])";
    return os.str();
  }
  const Group& group() const override { return group_; }

  void validate_state(const DiscretizedState& f) const override {
    const auto& g = f.grid();
    if (g.rank() != n_ + 1) throw InvalidArgument("exotic_rep: state rank must be n + 1");
    if (std::abs(g.offset[0] - 0.5 * g.spacing[0]) > 1e-12 * g.spacing[0]) {
      throw InvalidArgument("exotic_rep: the bc axis must start half a cell above bc = 0");
    }
  }

  DiscretizedState apply(const Point& g, const DiscretizedState& f) const override {
    validate_state(f);
    const auto& grid = f.grid();
    const std::size_t A = 3 + 3 * n_;
    DiscretizedState out = dilate(f, g[A]);
    out = shift_momentum(std::move(out), g);
    const double t_phase = central_phase(g);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto idx = grid.unflatten(i);
      double ph = t_phase + g[2] * grid.coord(0, idx[0]);
      for (std::size_t d = 0; d < n_; ++d) ph += g[3 + d] * grid.coord(1 + d, idx[1 + d]);
      out[i] *= unit(ph);
    }
    return out;
  }

  Box safe_box(const DiscretizedState& psi) const override {
    validate_state(psi);
    const auto& grid = psi.grid();
    Box box{{-unbounded, unbounded}, {-unbounded, unbounded}, {-grid.nyquist(0), grid.nyquist(0)}};
    for (std::size_t d = 0; d < n_; ++d) box.push_back({-grid.nyquist(1 + d), grid.nyquist(1 + d)});
    for (std::size_t d = 0; d < n_; ++d) box.push_back({-0.5 * grid.length(1 + d), 0.5 * grid.length(1 + d)});
    for (std::size_t d = 0; d < n_; ++d) box.push_back({-unbounded, unbounded});
    box.push_back({1.0 / 32.0, 32.0});
    return box;
  }

  /// g(bc, pc) = a^{1/2} f(a bc, pc); zero beyond the sampled half-line.
  DiscretizedState dilate(const DiscretizedState& f, double a) const {
    if (!(a > 0.0)) throw InvalidArgument("exotic_rep: scale a must be positive");
    const auto& grid = f.grid();
    const std::size_t N = grid.count[0], stride = grid.stride(0);
    const auto W = dilation_matrix(grid, a);
    DiscretizedState out(grid);
    const double amp = std::sqrt(a);
    for (std::size_t s = 0; s < stride; ++s) {
      for (std::size_t i = 0; i < N; ++i) {
        cplx acc = 0.0;
        for (std::size_t j = 0; j < N; ++j) acc += W[i * N + j] * f[j * stride + s];
        out[i * stride + s] = amp * acc;
      }
    }
    return out;
  }

  std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                 const std::vector<Point>& nodes) const override {
    psi.require_compatible(phi, "coefficients");
    validate_state(psi);
    const auto& grid = psi.grid();
    const std::size_t A = 3 + 3 * n_, Nb = grid.count[0], stride = grid.stride(0);
    std::vector<std::size_t> slow;
    for (std::size_t d = 0; d < n_; ++d) slow.push_back(3 + n_ + d);
    slow.push_back(A);
    const auto groups = detail::group_nodes(nodes, slow);
    std::vector<Point> keys;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [key, idx] : groups) {
      keys.push_back(key);
      members.push_back(&idx);
    }
    std::map<double, DiscretizedState> dilated;
    for (const auto& key : keys) {
      if (!dilated.contains(key.back())) dilated.emplace(key.back(), dilate(psi, key.back()));
    }
    std::vector<cplx> out(nodes.size());
    const double vol = grid.cell_volume();
    parallel_for(keys.size(), [&](std::size_t gi) {
      Point g0(A + 1, 0.0);
      for (std::size_t d = 0; d < n_; ++d) g0[3 + n_ + d] = keys[gi][d];
      const DiscretizedState moved = shift_momentum(dilated.at(keys[gi].back()), g0);
      std::vector<cplx> prod(grid.size());
      for (std::size_t j = 0; j < prod.size(); ++j) prod[j] = std::conj(moved[j]) * phi[j] * vol;
      std::map<double, std::vector<cplx>> rows;
      for (std::size_t idx : *members[gi]) {
        const double b = nodes[idx][2];
        if (rows.contains(b)) continue;
        std::vector<cplx> row(stride);
        std::vector<cplx> e(Nb);
        for (std::size_t j = 0; j < Nb; ++j) e[j] = unit(-b * grid.coord(0, j));
        for (std::size_t j = 0; j < Nb; ++j) {
          for (std::size_t s = 0; s < stride; ++s) row[s] += e[j] * prod[j * stride + s];
        }
        rows.emplace(b, std::move(row));
      }
      // Momentum phases exp(-i p.pc) depend only on p; nodes of one group usually share few p values.
      std::map<Point, std::vector<cplx>> phases;
      for (std::size_t idx : *members[gi]) {
        const Point& g = nodes[idx];
        const Point pkey(g.begin() + 3, g.begin() + 3 + static_cast<std::ptrdiff_t>(n_));
        auto it = phases.find(pkey);
        if (it == phases.end()) {
          std::vector<cplx> e(stride);
          for (std::size_t s = 0; s < stride; ++s) {
            std::size_t rem = s;
            double ph = 0.0;
            for (std::size_t d = n_; d-- > 0;) {
              ph += pkey[d] * grid.coord(1 + d, rem % grid.count[1 + d]);
              rem /= grid.count[1 + d];
            }
            e[s] = unit(-ph);
          }
          it = phases.emplace(pkey, std::move(e)).first;
        }
        const auto& row = rows.at(g[2]);
        const auto& e = it->second;
        cplx acc = 0.0;
        for (std::size_t s = 0; s < stride; ++s) acc += e[s] * row[s];
        out[idx] = unit(-central_phase(g)) * acc;
      }
    });
    return out;
  }

  /// Adjoint of coefficients: per (q, a) group, one shifted dilate times the separable sum of b and p phases.
  DiscretizedState superpose(const DiscretizedState& psi, const std::vector<cplx>& weights,
                             const std::vector<Point>& nodes) const override {
    if (weights.size() != nodes.size()) throw InvalidArgument("superpose: weight/node count mismatch");
    validate_state(psi);
    const auto& grid = psi.grid();
    const std::size_t A = 3 + 3 * n_, Nb = grid.count[0], stride = grid.stride(0);
    std::vector<std::size_t> slow;
    for (std::size_t d = 0; d < n_; ++d) slow.push_back(3 + n_ + d);
    slow.push_back(A);
    const auto groups = detail::group_nodes(nodes, slow);
    std::vector<Point> keys;
    std::vector<const std::vector<std::size_t>*> members;
    for (const auto& [key, idx] : groups) {
      keys.push_back(key);
      members.push_back(&idx);
    }
    std::map<double, DiscretizedState> dilated;
    for (const auto& key : keys) {
      if (!dilated.contains(key.back())) dilated.emplace(key.back(), dilate(psi, key.back()));
    }
    std::vector<DiscretizedState> partial(keys.size(), DiscretizedState(grid));
    parallel_for(keys.size(), [&](std::size_t gi) {
      // W[b][p] = sum of w_i exp(i theta_i) over the members sharing (b, p).
      std::map<double, std::map<Point, cplx>> W;
      for (std::size_t idx : *members[gi]) {
        if (weights[idx] == cplx{}) continue;
        const Point& g = nodes[idx];
        const Point pkey(g.begin() + 3, g.begin() + 3 + static_cast<std::ptrdiff_t>(n_));
        W[g[2]][pkey] += weights[idx] * unit(central_phase(g));
      }
      if (W.empty()) return;
      std::map<Point, std::vector<cplx>> phases;
      std::vector<cplx> S(grid.size());
      for (const auto& [b, row] : W) {
        std::vector<cplx> T(stride);
        for (const auto& [pkey, w] : row) {
          auto it = phases.find(pkey);
          if (it == phases.end()) {
            std::vector<cplx> e(stride);
            for (std::size_t s = 0; s < stride; ++s) {
              std::size_t rem = s;
              double ph = 0.0;
              for (std::size_t d = n_; d-- > 0;) {
                ph += pkey[d] * grid.coord(1 + d, rem % grid.count[1 + d]);
                rem /= grid.count[1 + d];
              }
              e[s] = unit(ph);
            }
            it = phases.emplace(pkey, std::move(e)).first;
          }
          for (std::size_t s = 0; s < stride; ++s) T[s] += w * it->second[s];
        }
        for (std::size_t j = 0; j < Nb; ++j) {
          const cplx e = unit(b * grid.coord(0, j));
          for (std::size_t s = 0; s < stride; ++s) S[j * stride + s] += e * T[s];
        }
      }
      Point g0(A + 1, 0.0);
      for (std::size_t d = 0; d < n_; ++d) g0[3 + n_ + d] = keys[gi][d];
      const DiscretizedState moved = shift_momentum(dilated.at(keys[gi].back()), g0);
      for (std::size_t j = 0; j < S.size(); ++j) partial[gi][j] = moved[j] * S[j];
    });
    DiscretizedState out(grid);
    for (const auto& p : partial) out += p;
    return out;
  }

  const Point& kvec() const { return kvec_; }

 private:
  double central_phase(const Point& g) const {
    double ph = g[0];
    for (std::size_t d = 0; d < n_; ++d) ph += kvec_[d] * g[3 + 2 * n_ + d];
    return ph;
  }

  // f(bc, pc + q) along the momentum axes.
  DiscretizedState shift_momentum(DiscretizedState f, const Point& g) const {
    for (std::size_t d = 0; d < n_; ++d) f = translate_axis(std::move(f), 1 + d, -g[3 + n_ + d]);
    return f;
  }

  // Row i gives the interpolated value at a * bc_i from the samples at bc_j,
  // through the odd sine series sum_m beta_m sin(m pi y / L).
  static std::vector<double> dilation_matrix(const StateGrid& grid, double a) {
    const std::size_t N = grid.count[0];
    const double L = grid.length(0);
    const double Nd = static_cast<double>(N);
    std::vector<double> inv(N * N);  // beta_m = sum_j inv[m-1][j] f_j
    for (std::size_t m = 1; m <= N; ++m) {
      const double c = (m == N ? 1.0 : 2.0) / Nd;
      for (std::size_t j = 0; j < N; ++j) {
        inv[(m - 1) * N + j] = c * std::sin(pi * static_cast<double>(m) * (static_cast<double>(j) + 0.5) / Nd);
      }
    }
    std::vector<double> W(N * N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      const double y = a * grid.coord(0, i);
      if (y >= L) continue;
      for (std::size_t m = 1; m <= N; ++m) {
        const double sm = std::sin(pi * static_cast<double>(m) * y / L);
        for (std::size_t j = 0; j < N; ++j) W[i * N + j] += sm * inv[(m - 1) * N + j];
      }
    }
    return W;
  }

  std::size_t n_;
  Point kvec_;
  Group group_;
};

inline std::shared_ptr<const ExoticRep> exotic_rep(std::size_t n, Point kvec = {}) {
  return std::make_shared<ExoticRep>(n, std::move(kvec));
}

// --- projective pullbacks and lifts --------------------------------------------

/// P_s(x) = U(s(x)), a projective representation of X with multiplier m_s.
class ProjectiveRep : public Representation {
 public:
  ProjectiveRep(Rep U, Section s) : U_(std::move(U)), s_(std::move(s)), m_(multiplier_from_section(s_)) {
    if (U_->group()->name != s_.sub->ambient->name) {
      throw InvalidArgument("projective_from_section: representation and section live on different groups");
    }
  }

  std::string label() const override { return "P[" + U_->label() + ", " + s_.name + "]"; }
  const Group& group() const override { return s_.sub->quotient; }
  const Multiplier& multiplier() const { return m_; }
  const Section& section() const { return s_; }
  const Rep& base() const { return U_; }

  void validate_state(const DiscretizedState& f) const override { U_->validate_state(f); }

  DiscretizedState apply(const Point& x, const DiscretizedState& f) const override { return U_->apply(s_(x), f); }

  DiscretizedState apply_inverse(const Point& x, const DiscretizedState& f) const override {
    return U_->apply_inverse(s_(x), f);
  }

  Box safe_box(const DiscretizedState& psi) const override {
    const Box gb = U_->safe_box(psi);
    Point lo, hi;
    for (const auto& [l, h] : gb) {
      lo.push_back(l);
      hi.push_back(h);
    }
    const Point xl = s_.sub->projection(lo), xh = s_.sub->projection(hi);
    Box box;
    for (std::size_t i = 0; i < xl.size(); ++i) box.push_back({xl[i], xh[i]});
    return box;
  }

  std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                 const std::vector<Point>& nodes) const override {
    return U_->coefficients(psi, phi, lift_nodes(nodes));
  }

  DiscretizedState superpose(const DiscretizedState& psi, const std::vector<cplx>& weights,
                             const std::vector<Point>& nodes) const override {
    return U_->superpose(psi, weights, lift_nodes(nodes));
  }

 private:
  std::vector<Point> lift_nodes(const std::vector<Point>& nodes) const {
    std::vector<Point> g(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) g[i] = s_(nodes[i]);
    return g;
  }

  Rep U_;
  Section s_;
  Multiplier m_;
};

inline std::shared_ptr<const ProjectiveRep> projective_from_section(Rep U, Section s) {
  return std::make_shared<ProjectiveRep>(std::move(U), std::move(s));
}

enum class LiftVariant { standard, starred };

/// standard: (theta, x) -> e^{-i theta} P(x) on X_m; starred: e^{+i theta} P(x) on X_{m*}.
class ExtensionRep : public Representation {
 public:
  ExtensionRep(std::shared_ptr<const ProjectiveRep> P, LiftVariant variant)
      : P_(std::move(P)),
        variant_(variant),
        group_(central_extension(P_->group(),
                                 variant == LiftVariant::standard ? P_->multiplier() : conjugate(P_->multiplier()))) {}

  std::string label() const override {
    return std::string(variant_ == LiftVariant::standard ? "U_P[" : "U_*P[") + P_->label() + "]";
  }
  const Group& group() const override { return group_; }
  void validate_state(const DiscretizedState& f) const override { P_->validate_state(f); }

  DiscretizedState apply(const Point& g, const DiscretizedState& f) const override {
    return unit(sign() * g[0]) * P_->apply(Point(g.begin() + 1, g.end()), f);
  }

  Box safe_box(const DiscretizedState& psi) const override {
    Box box{{0.0, two_pi}};
    for (const auto& r : P_->safe_box(psi)) box.push_back(r);
    return box;
  }

  std::vector<cplx> coefficients(const DiscretizedState& psi, const DiscretizedState& phi,
                                 const std::vector<Point>& nodes) const override {
    std::vector<Point> xs(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) xs[i] = Point(nodes[i].begin() + 1, nodes[i].end());
    auto c = P_->coefficients(psi, phi, xs);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= unit(-sign() * nodes[i][0]);
    return c;
  }

 private:
  double sign() const { return variant_ == LiftVariant::standard ? -1.0 : 1.0; }

  std::shared_ptr<const ProjectiveRep> P_;
  LiftVariant variant_;
  Group group_;
};

inline std::shared_ptr<const ExtensionRep> lift_to_extension(std::shared_ptr<const ProjectiveRep> P,
                                                             LiftVariant variant) {
  return std::make_shared<ExtensionRep>(std::move(P), variant);
}

}  // namespace sqint

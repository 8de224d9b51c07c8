#pragma once

// Functions on X stored through their section trace, the chi-covariant
// extension F_s, the induced representation R^{chi,s}, the left regular
// m-representation, and intertwining defects.

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sqint/group.hpp"
#include "sqint/measures.hpp"
#include "sqint/multiplier.hpp"
#include "sqint/state.hpp"

namespace sqint {

/// Complex values on the nodes of a full tensor quadrature grid over X.
struct GridFunction {
  std::shared_ptr<const QuadratureGrid> grid;
  std::vector<cplx> values;
  /// Evaluation points that fell outside the grid box while producing these values.
  std::size_t out_of_box = 0;

  std::size_t size() const { return values.size(); }
};

inline GridFunction make_grid_function(std::shared_ptr<const QuadratureGrid> grid, std::vector<cplx> values) {
  if (!grid) throw InvalidArgument("GridFunction: null grid");
  if (values.size() != grid->size()) throw InvalidArgument("GridFunction: value count differs from node count");
  return {std::move(grid), std::move(values), 0};
}

inline double grid_norm_sq(const GridFunction& f) {
  std::vector<double> t(f.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(f.values[i]) * f.grid->weights[i];
  return pairwise_sum(t);
}

inline double grid_norm(const GridFunction& f) { return std::sqrt(grid_norm_sq(f)); }

inline cplx grid_inner(const GridFunction& a, const GridFunction& b) {
  if (a.grid != b.grid) throw InvalidArgument("grid_inner: functions live on different grids");
  std::vector<cplx> t(a.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(a.values[i]) * b.values[i] * a.grid->weights[i];
  return pairwise_sum(t);
}

inline GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  if (a.grid != b.grid) throw InvalidArgument("GridFunction difference: different grids");
  GridFunction out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out.values[i] -= b.values[i];
  out.out_of_box = a.out_of_box + b.out_of_box;
  return out;
}

namespace detail {

/// Periodic trigonometric interpolation weights on one uniform axis; a single
/// unit weight when the point coincides with a node.
inline std::vector<std::pair<std::size_t, double>> trig_weights(const std::vector<double>& axis_u, double u) {
  const std::size_t N = axis_u.size();
  const double h = N > 1 ? axis_u[1] - axis_u[0] : 1.0;
  const double pos = (u - axis_u[0]) / h;
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) < 1e-9 && nearest >= 0.0 && nearest < static_cast<double>(N)) {
    return {{static_cast<std::size_t>(nearest), 1.0}};
  }
  // Closed-form periodic Dirichlet kernel; for even N the Nyquist term enters as a cosine.
  std::vector<std::pair<std::size_t, double>> w(N);
  const double Nd = static_cast<double>(N);
  const bool even = N % 2 == 0;
  for (std::size_t j = 0; j < N; ++j) {
    const double d = two_pi * (pos - static_cast<double>(j)) / Nd;
    const double half = std::sin(0.5 * d);
    double s;
    if (even) {
      s = std::sin(0.5 * (Nd - 1.0) * d) / half + std::cos(0.5 * Nd * d);
    } else {
      s = std::sin(0.5 * Nd * d) / half;
    }
    w[j] = {j, s / Nd};
  }
  return w;
}

}  // namespace detail

/// Band-limited value of f at an arbitrary chart point; 0 (and flagged) outside the box.
inline cplx interpolate(const GridFunction& f, const Point& y, bool* outside = nullptr) {
  const auto& g = *f.grid;
  if (g.dropped != 0) throw InvalidArgument("interpolate: grid must be a full tensor grid");
  const std::size_t d = g.axes.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> w(d);
  for (std::size_t ax = 0; ax < d; ++ax) {
    const auto [lo, hi] = g.box[ax];
    if (!(y[ax] >= lo && y[ax] <= hi)) {
      if (outside) *outside = true;
      return 0.0;
    }
    if (g.spacing[ax] == AxisSpacing::log) {
      std::vector<double> u(g.axes[ax].size());
      for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::log(g.axes[ax][j]);
      w[ax] = detail::trig_weights(u, std::log(y[ax]));
    } else {
      w[ax] = detail::trig_weights(g.axes[ax], y[ax]);
    }
  }
  cplx acc = 0.0;
  std::vector<std::size_t> pos(d, 0);
  while (true) {
    std::size_t flat = 0;
    double weight = 1.0;
    for (std::size_t ax = 0; ax < d; ++ax) {
      flat = flat * g.resolution[ax] + w[ax][pos[ax]].first;
      weight *= w[ax][pos[ax]].second;
    }
    acc += weight * f.values[flat];
    bool done = true;
    for (std::size_t ax = d; ax-- > 0;) {
      if (++pos[ax] < w[ax].size()) {
        done = false;
        break;
      }
      pos[ax] = 0;
    }
    if (done) break;
  }
  return acc;
}

// --- covariant functions ---------------------------------------------------------

/// f on G with f(g k) = chi(k)^-1 f(g), stored as its trace x -> f(s(x)).
class CovariantFunction {
 public:
  CovariantFunction(Section s, GridFunction trace) : s_(std::move(s)), trace_(std::move(trace)) {}

  const GridFunction& trace() const { return trace_; }
  const Section& section() const { return s_; }

  /// f(g) = chi(k)^-1 f(s(x)) for (x, k) = gamma_s^-1(g); off-node x is interpolated.
  cplx at(const Point& g) const {
    const auto [x, k] = gamma_s_inv(s_, g);
    return unit(-s_.sub->character(k)) * interpolate(trace_, x);
  }

  double norm() const { return grid_norm(trace_); }

 private:
  Section s_;
  GridFunction trace_;
};

/// (F_s phi)(g) = chi(s(p(g))^-1 g)^-1 phi(p(g)).
inline CovariantFunction F_s(const Section& s, const GridFunction& phi) { return {s, phi}; }

/// (R^{chi,s}(g) f)(x) = chi(c_s(g^-1, x)) f(g^-1[x]).
inline GridFunction R_chi_s(const Section& s, const Point& g, const GridFunction& f) {
  const auto& G = *s.sub->ambient;
  const Point gi = G.inverse(g);
  GridFunction out = f;
  std::vector<char> outside(f.size(), 0);
  parallel_for(f.size(), [&](std::size_t i) {
    const Point& x = f.grid->nodes[i];
    const Point y = s.sub->act(gi, x);
    bool out_flag = false;
    const cplx v = interpolate(f, y, &out_flag);
    outside[i] = out_flag ? 1 : 0;
    out.values[i] = unit(s.sub->character(section_cocycle(s, gi, x))) * v;
  });
  out.out_of_box = f.out_of_box;
  for (char c : outside) out.out_of_box += static_cast<std::size_t>(c);
  return out;
}

/// (R^m_g f)(x) = m(g, g^-1 x)^-1 f(g^-1 x).
inline GridFunction left_reg_m(const Multiplier& m, const Point& g, const GridFunction& f) {
  const auto& X = *m.base;
  const Point gi = X.inverse(g);
  GridFunction out = f;
  std::vector<char> outside(f.size(), 0);
  parallel_for(f.size(), [&](std::size_t i) {
    const Point y = X.product(gi, f.grid->nodes[i]);
    bool out_flag = false;
    const cplx v = interpolate(f, y, &out_flag);
    outside[i] = out_flag ? 1 : 0;
    out.values[i] = unit(-m.phase(g, y)) * v;
  });
  out.out_of_box = f.out_of_box;
  for (char c : outside) out.out_of_box += static_cast<std::size_t>(c);
  return out;
}

// --- intertwining ----------------------------------------------------------------------

inline double norm_of(const DiscretizedState& v) { return v.norm(); }
inline double norm_of(const GridFunction& v) { return grid_norm(v); }

/// max over tests of ||A U_left(g) v - U_right(g) A v|| / ||v||.
template <class Op, class Left, class Right, class V>
double intertwine_defect(Op&& A, Left&& left, Right&& right, const Point& g, const std::vector<V>& tests) {
  double worst = 0.0;
  for (const auto& v : tests) {
    const double nv = norm_of(v);
    if (nv == 0.0) continue;
    const auto lhs = A(left(g, v));
    const auto rhs = right(g, A(v));
    worst = std::max(worst, norm_of(lhs - rhs) / nv);
  }
  return worst;
}

}  // namespace sqint

#pragma once

// Locally compact groups realized as charts on R^d, plus midpoint Haar
// quadrature over truncated chart boxes.

#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sqint/core.hpp"

namespace sqint {

using Box = std::vector<std::pair<double, double>>;

struct GroupDescriptor {
  std::string name;
  std::size_t dim = 0;
  std::vector<std::string> coords;
  /// 0 for a line coordinate, otherwise the period of a circle coordinate.
  std::vector<double> periods;
  Point identity;
  std::function<Point(const Point&, const Point&)> product;
  std::function<Point(const Point&)> inverse;
  /// Density of left Haar measure with respect to Lebesgue measure on the chart.
  std::function<double(const Point&)> haar_density;
  std::function<double(const Point&)> modular;
  std::function<bool(const Point&)> domain;

  // Human-readable conventions, emitted verbatim by the `conventions` command.
  std::string product_law;
  std::string inverse_law;
  std::string haar_law;
  std::string modular_law;
  std::string notes;

  bool contains(const Point& g) const { return g.size() == dim && (!domain || domain(g)); }
};

using Group = std::shared_ptr<const GroupDescriptor>;

/// Chart distance, circle-aware (max norm over coordinates).
inline double chart_distance(const GroupDescriptor& G, const Point& a, const Point& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < G.dim; ++i) {
    double di = a[i] - b[i];
    if (G.periods.size() > i && G.periods[i] > 0.0) di = std::remainder(di, G.periods[i]);
    d = std::max(d, std::abs(di));
  }
  return d;
}

/// A chart point bound to its group; construction validates the domain.
class GroupElement {
 public:
  GroupElement(Group group, Point coords) : group_(std::move(group)), coords_(std::move(coords)) {
    if (!group_->contains(coords_)) {
      throw InvalidArgument("point outside the chart domain of " + group_->name);
    }
  }

  const Point& coords() const { return coords_; }
  const Group& group() const { return group_; }

  GroupElement operator*(const GroupElement& h) const {
    if (h.group_ != group_) throw InvalidArgument("product of elements of different groups");
    return {group_, group_->product(coords_, h.coords_)};
  }
  GroupElement inverse() const { return {group_, group_->inverse(coords_)}; }

 private:
  Group group_;
  Point coords_;
};

// --- factories -------------------------------------------------------------

namespace detail {

inline std::vector<std::string> indexed(const std::string& base, std::size_t n) {
  std::vector<std::string> out;
  if (n == 1) {
    out.push_back(base);
  } else {
    for (std::size_t i = 1; i <= n; ++i) out.push_back(base + std::to_string(i));
  }
  return out;
}

inline void require_dim(std::size_t n, const char* what) {
  if (n == 0) throw InvalidArgument(std::string(what) + ": dimension n must be >= 1");
}

inline double dot_range(const Point& a, std::size_t ia, const Point& b, std::size_t ib, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[ia + i] * b[ib + i];
  return s;
}

}  // namespace detail

/// Abelian vector group R^d with constant Haar density.
inline Group make_vector_group(std::string name, std::vector<std::string> coords, double density = 1.0) {
  auto G = std::make_shared<GroupDescriptor>();
  G->name = std::move(name);
  G->dim = coords.size();
  G->coords = std::move(coords);
  G->periods.assign(G->dim, 0.0);
  G->identity.assign(G->dim, 0.0);
  G->product = [](const Point& x, const Point& y) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
    return z;
  };
  G->inverse = [](const Point& x) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = -x[i];
    return z;
  };
  G->haar_density = [density](const Point&) { return density; };
  G->modular = [](const Point&) { return 1.0; };
  G->domain = [](const Point&) { return true; };
  G->product_law = "x + x'";
  G->inverse_law = "-x";
  std::ostringstream os;
  os.precision(17);
  os << density << " dx (Lebesgue)";
  G->haar_law = os.str();
  G->modular_law = "1";
  return G;
}

/// Polarized Weyl-Heisenberg group, chart (k, p, q) with
/// (k,p,q)(k',p',q') = (k + k' + q.p', p + p', q + q').
inline Group make_polarized_wh(std::size_t n) {
  detail::require_dim(n, "make_polarized_wh");
  auto G = std::make_shared<GroupDescriptor>();
  G->name = "polarized_wh" + std::to_string(n);
  G->dim = 2 * n + 1;
  G->coords = {"k"};
  for (auto& c : detail::indexed("p", n)) G->coords.push_back(c);
  for (auto& c : detail::indexed("q", n)) G->coords.push_back(c);
  G->periods.assign(G->dim, 0.0);
  G->identity.assign(G->dim, 0.0);
  G->product = [n](const Point& x, const Point& y) {
    Point z(2 * n + 1);
    z[0] = x[0] + y[0] + detail::dot_range(x, 1 + n, y, 1, n);
    for (std::size_t i = 1; i < 2 * n + 1; ++i) z[i] = x[i] + y[i];
    return z;
  };
  G->inverse = [n](const Point& x) {
    Point z(2 * n + 1);
    z[0] = -x[0] + detail::dot_range(x, 1 + n, x, 1, n);
    for (std::size_t i = 1; i < 2 * n + 1; ++i) z[i] = -x[i];
    return z;
  };
  const double density = std::pow(two_pi, -static_cast<double>(n));
  G->haar_density = [density](const Point&) { return density; };
  G->modular = [](const Point&) { return 1.0; };
  G->domain = [](const Point&) { return true; };
  G->product_law = "(k + k' + q.p', p + p', q + q')";
  G->inverse_law = "(-k + q.p, -p, -q)";
  G->haar_law = "(2 pi)^-n dk dp dq";
  G->modular_law = "1";
  G->notes = "Haar fixed so that mu_G = mu_X (x) mu_K with mu_K = dk and mu_X = dp dq / (2 pi)^n.";
  return G;
}

/// Standard Weyl-Heisenberg group, chart (k, p, q) with the symmetric law
/// (k + k' + (q.p' - p.q')/2, p + p', q + q').
inline Group make_standard_wh(std::size_t n) {
  detail::require_dim(n, "make_standard_wh");
  auto G = std::make_shared<GroupDescriptor>(*make_polarized_wh(n));
  G->name = "standard_wh" + std::to_string(n);
  G->product = [n](const Point& x, const Point& y) {
    Point z(2 * n + 1);
    z[0] = x[0] + y[0] + 0.5 * (detail::dot_range(x, 1 + n, y, 1, n) - detail::dot_range(x, 1, y, 1 + n, n));
    for (std::size_t i = 1; i < 2 * n + 1; ++i) z[i] = x[i] + y[i];
    return z;
  };
  G->inverse = [](const Point& x) {
    Point z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = -x[i];
    return z;
  };
  G->product_law = "(k + k' + (q.p' - p.q')/2, p + p', q + q')";
  G->inverse_law = "(-k, -p, -q)";
  return G;
}

/// Isomorphism from the standard onto the polarized Weyl-Heisenberg chart.
inline Point delta_iso(const Point& g) {
  if (g.size() % 2 == 0) throw InvalidArgument("delta_iso: expected a (2n+1)-dimensional point");
  const std::size_t n = (g.size() - 1) / 2;
  Point z = g;
  z[0] += 0.5 * detail::dot_range(g, 1, g, 1 + n, n);
  return z;
}

/// Affine group of R^n, chart (b, a) with (b,a)(b',a') = (b + a b', a a'), a > 0.
inline Group make_affine(std::size_t n) {
  detail::require_dim(n, "make_affine");
  auto G = std::make_shared<GroupDescriptor>();
  G->name = "affine" + std::to_string(n);
  G->dim = n + 1;
  G->coords = detail::indexed("b", n);
  G->coords.push_back("a");
  G->periods.assign(G->dim, 0.0);
  G->identity.assign(G->dim, 0.0);
  G->identity[n] = 1.0;
  G->product = [n](const Point& x, const Point& y) {
    Point z(n + 1);
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] + x[n] * y[i];
    z[n] = x[n] * y[n];
    return z;
  };
  G->inverse = [n](const Point& x) {
    Point z(n + 1);
    for (std::size_t i = 0; i < n; ++i) z[i] = -x[i] / x[n];
    z[n] = 1.0 / x[n];
    return z;
  };
  const double nn = static_cast<double>(n);
  G->haar_density = [n, nn](const Point& x) { return std::pow(x[n], -(nn + 1.0)); };
  G->modular = [n, nn](const Point& x) { return std::pow(x[n], -nn); };
  G->domain = [n](const Point& x) { return x[n] > 0.0; };
  G->product_law = "(b + a b', a a')";
  G->inverse_law = "(-b/a, 1/a)";
  G->haar_law = "a^-(n+1) db da";
  G->modular_law = "a^-n";
  return G;
}

/// The (3n+4)-dimensional group with chart (t, s, b, p, q, r, a):
/// (t + t' + q.p', s + a s' + r.p', b + a b', p + p', q + q', r + a r', a a').
inline Group make_exotic(std::size_t n) {
  detail::require_dim(n, "make_exotic");
  auto G = std::make_shared<GroupDescriptor>();
  G->name = "exotic" + std::to_string(n);
  G->dim = 3 * n + 4;
  G->coords = {"t", "s", "b"};
  for (auto& c : detail::indexed("p", n)) G->coords.push_back(c);
  for (auto& c : detail::indexed("q", n)) G->coords.push_back(c);
  for (auto& c : detail::indexed("r", n)) G->coords.push_back(c);
  G->coords.push_back("a");
  G->periods.assign(G->dim, 0.0);
  G->identity.assign(G->dim, 0.0);
  const std::size_t P = 3, Q = 3 + n, R = 3 + 2 * n, A = 3 + 3 * n;
  G->identity[A] = 1.0;
  G->product = [=](const Point& x, const Point& y) {
    Point z(A + 1);
    const double a = x[A];
    z[0] = x[0] + y[0] + detail::dot_range(x, Q, y, P, n);
    z[1] = x[1] + a * y[1] + detail::dot_range(x, R, y, P, n);
    z[2] = x[2] + a * y[2];
    for (std::size_t i = 0; i < n; ++i) {
      z[P + i] = x[P + i] + y[P + i];
      z[Q + i] = x[Q + i] + y[Q + i];
      z[R + i] = x[R + i] + a * y[R + i];
    }
    z[A] = a * y[A];
    return z;
  };
  G->inverse = [=](const Point& x) {
    Point z(A + 1);
    const double a = x[A];
    z[0] = -x[0] + detail::dot_range(x, Q, x, P, n);
    z[1] = (-x[1] + detail::dot_range(x, R, x, P, n)) / a;
    z[2] = -x[2] / a;
    for (std::size_t i = 0; i < n; ++i) {
      z[P + i] = -x[P + i];
      z[Q + i] = -x[Q + i];
      z[R + i] = -x[R + i] / a;
    }
    z[A] = 1.0 / a;
    return z;
  };
  // Left translation has Jacobian a^(n+3); right translation a'.
  const double nn = static_cast<double>(n);
  const double c = std::pow(two_pi, -(nn + 1.0));
  G->haar_density = [=](const Point& x) { return c * std::pow(x[A], -(nn + 3.0)); };
  G->modular = [=](const Point& x) { return std::pow(x[A], -(nn + 2.0)); };
  G->domain = [=](const Point& x) { return x[A] > 0.0; };
  G->product_law =
      "(t + t' + q.p', s + a s' + r.p', b + a b', p + p', q + q', r + a r', a a')";
  G->inverse_law = "(-t + q.p, (-s + r.p)/a, -b/a, -p, -q, -r/a, 1/a)";
  G->haar_law = "(2 pi)^-(n+1) a^-(n+3) dt ds db dp dq dr da";
  G->modular_law = "a^-(n+2)";
  G->notes =
      "Left Haar density from the Jacobian a^(n+3) of left translation; the right-translation "
      "Jacobian a' gives the modular function. Normalized so mu_G = mu_X (x) dt ds dr.";
  return G;
}

/// Quotient of the exotic group by T x S x R: chart (p, q, b, a), the direct
/// product of R^2n with the (1+1)-dimensional affine group.
inline Group make_exotic_quotient(std::size_t n) {
  detail::require_dim(n, "make_exotic_quotient");
  auto G = std::make_shared<GroupDescriptor>();
  G->name = "exotic_quotient" + std::to_string(n);
  G->dim = 2 * n + 2;
  G->coords = detail::indexed("p", n);
  for (auto& c : detail::indexed("q", n)) G->coords.push_back(c);
  G->coords.push_back("b");
  G->coords.push_back("a");
  G->periods.assign(G->dim, 0.0);
  G->identity.assign(G->dim, 0.0);
  const std::size_t B = 2 * n, A = 2 * n + 1;
  G->identity[A] = 1.0;
  G->product = [=](const Point& x, const Point& y) {
    Point z(A + 1);
    for (std::size_t i = 0; i < 2 * n; ++i) z[i] = x[i] + y[i];
    z[B] = x[B] + x[A] * y[B];
    z[A] = x[A] * y[A];
    return z;
  };
  G->inverse = [=](const Point& x) {
    Point z(A + 1);
    for (std::size_t i = 0; i < 2 * n; ++i) z[i] = -x[i];
    z[B] = -x[B] / x[A];
    z[A] = 1.0 / x[A];
    return z;
  };
  const double c = std::pow(two_pi, -(static_cast<double>(n) + 1.0));
  G->haar_density = [=](const Point& x) { return c / (x[A] * x[A]); };
  G->modular = [=](const Point& x) { return 1.0 / x[A]; };
  G->domain = [=](const Point& x) { return x[A] > 0.0; };
  G->product_law = "(p + p', q + q', b + a b', a a')";
  G->inverse_law = "(-p, -q, -b/a, 1/a)";
  G->haar_law = "(2 pi)^-(n+1) a^-2 dp dq db da";
  G->modular_law = "a^-1";
  G->notes = "Normalization makes the Duflo-Moore operator exactly b^-1/2 on L^2(db dp).";
  return G;
}

/// Phase space X = P x Q of the Weyl-Heisenberg group, chart (p, q), mu_X = dp dq / (2 pi)^n.
inline Group make_wh_phase_space(std::size_t n) {
  detail::require_dim(n, "make_wh_phase_space");
  auto coords = detail::indexed("p", n);
  for (auto& c : detail::indexed("q", n)) coords.push_back(c);
  auto base = make_vector_group("wh_phase_space" + std::to_string(n), coords,
                                std::pow(two_pi, -static_cast<double>(n)));
  auto G = std::make_shared<GroupDescriptor>(*base);
  G->haar_law = "(2 pi)^-n dp dq";
  return G;
}

// --- quadrature ------------------------------------------------------------

enum class AxisSpacing { linear, log };

/// Midpoint nodes over a chart box. Weight = chart cell volume x Haar density.
struct QuadratureGrid {
  std::vector<Point> nodes;
  std::vector<double> weights;
  Box box;
  std::vector<std::size_t> resolution;
  std::vector<AxisSpacing> spacing;
  /// Node coordinate values per axis, and the chart width of each axis cell.
  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> cell_widths;
  std::size_t dropped = 0;

  std::size_t size() const { return nodes.size(); }

  double total_weight() const { return pairwise_sum(weights); }

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(nodes.front()));
    std::vector<R> terms(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) terms[i] = f(nodes[i]) * weights[i];
    return pairwise_sum(terms);
  }
};

inline QuadratureGrid haar_grid(const GroupDescriptor& G, const Box& box,
                                const std::vector<std::size_t>& resolution,
                                std::vector<AxisSpacing> spacing = {}) {
  if (box.size() != G.dim || resolution.size() != G.dim) {
    throw InvalidArgument("haar_grid: box/resolution rank differs from group dimension");
  }
  if (spacing.empty()) spacing.assign(G.dim, AxisSpacing::linear);
  QuadratureGrid grid;
  grid.box = box;
  grid.resolution = resolution;
  grid.spacing = spacing;
  for (std::size_t ax = 0; ax < G.dim; ++ax) {
    const auto [lo, hi] = box[ax];
    const std::size_t m = resolution[ax];
    if (m < 1 || !(hi > lo)) throw InvalidArgument("haar_grid: empty axis " + std::to_string(ax));
    std::vector<double> values(m), widths(m);
    if (spacing[ax] == AxisSpacing::linear) {
      const double h = (hi - lo) / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        values[i] = lo + (static_cast<double>(i) + 0.5) * h;
        widths[i] = h;
      }
    } else {
      if (!(lo > 0.0)) throw InvalidArgument("haar_grid: log spacing needs a positive axis");
      const double du = (std::log(hi) - std::log(lo)) / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i) {
        values[i] = std::exp(std::log(lo) + (static_cast<double>(i) + 0.5) * du);
        widths[i] = values[i] * du;
      }
    }
    grid.axes.push_back(std::move(values));
    grid.cell_widths.push_back(std::move(widths));
  }

  std::size_t total = 1;
  for (auto m : resolution) total *= m;
  grid.nodes.reserve(total);
  grid.weights.reserve(total);
  std::vector<std::size_t> idx(G.dim, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t ax = G.dim; ax-- > 0;) {
      idx[ax] = rem % resolution[ax];
      rem /= resolution[ax];
    }
    Point x(G.dim);
    double vol = 1.0;
    for (std::size_t ax = 0; ax < G.dim; ++ax) {
      x[ax] = grid.axes[ax][idx[ax]];
      vol *= grid.cell_widths[ax][idx[ax]];
    }
    if (!G.contains(x)) {
      ++grid.dropped;
      continue;
    }
    grid.weights.push_back(vol * G.haar_density(x));
    grid.nodes.push_back(std::move(x));
  }
  if (grid.nodes.empty()) throw InvalidArgument("haar_grid: box does not meet the domain of " + G.name);
  return grid;
}

// --- algebraic self-checks ---------------------------------------------------

struct AxiomDefects {
  double identity = 0.0;
  double inverse = 0.0;
  double associativity = 0.0;
  double modular_identity = 0.0;
  double modular_homomorphism = 0.0;

  double max() const {
    return std::max({identity, inverse, associativity, modular_identity, modular_homomorphism});
  }
};

/// Samples group axioms at random chart points drawn from `box`.
inline AxiomDefects check_axioms(const GroupDescriptor& G, const Box& box, std::size_t samples, Rng& rng) {
  AxiomDefects d;
  d.modular_identity = std::abs(G.modular(G.identity) - 1.0);
  for (std::size_t i = 0; i < samples; ++i) {
    const Point g = rng.uniform_point(box), h = rng.uniform_point(box), l = rng.uniform_point(box);
    d.identity = std::max({d.identity, chart_distance(G, G.product(G.identity, g), g),
                           chart_distance(G, G.product(g, G.identity), g)});
    d.inverse = std::max({d.inverse, chart_distance(G, G.product(g, G.inverse(g)), G.identity),
                          chart_distance(G, G.product(G.inverse(g), g), G.identity)});
    d.associativity = std::max(
        d.associativity, chart_distance(G, G.product(G.product(g, h), l), G.product(g, G.product(h, l))));
    const double mg = G.modular(g), mh = G.modular(h);
    d.modular_homomorphism =
        std::max(d.modular_homomorphism, std::abs(G.modular(G.product(g, h)) - mg * mh) / (mg * mh));
  }
  return d;
}

/// Max defect of delta(g h) = delta(g) delta(h) from the standard to the polarized chart.
inline double delta_iso_defect(std::size_t n, const Box& box, std::size_t samples, Rng& rng) {
  const auto H = make_standard_wh(n);
  const auto Hp = make_polarized_wh(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const Point g = rng.uniform_point(box), h = rng.uniform_point(box);
    worst = std::max(worst, chart_distance(*Hp, delta_iso(H->product(g, h)), Hp->product(delta_iso(g), delta_iso(h))));
  }
  return worst;
}

/// Relative defect of left invariance: |int f(g g') dmu(g') - int f dmu| / |int f dmu|.
template <class F>
double left_invariance_defect(const GroupDescriptor& G, F&& f, const Point& g, const QuadratureGrid& grid) {
  const double base = grid.integrate([&](const Point& x) { return f(x); });
  const double moved = grid.integrate([&](const Point& x) { return f(G.product(g, x)); });
  return std::abs(moved - base) / std::abs(base);
}

/// Estimates Delta(g) from right translation: int f dmu / int f(x g) dmu(x).
template <class F>
double modular_from_right_translation(const GroupDescriptor& G, F&& f, const Point& g,
                                      const QuadratureGrid& grid) {
  const double base = grid.integrate([&](const Point& x) { return f(x); });
  const double moved = grid.integrate([&](const Point& x) { return f(G.product(x, g)); });
  return base / moved;
}

}  // namespace sqint

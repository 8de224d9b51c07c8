#pragma once

// The coordinate isomorphism gamma_s: X x K -> G, the decomposition of Haar
// measure along it, and measures in the class M_{G,K} given by densities rho
// that integrate to one over every K-coset.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sqint/group.hpp"
#include "sqint/multiplier.hpp"
#include "sqint/representation.hpp"

namespace sqint {

// --- gamma_s -------------------------------------------------------------------

/// gamma_s(x, k) = s(x) k.
inline Point gamma_s(const Section& s, const Point& x, const Point& k) {
  return s.sub->ambient->product(s(x), s.sub->embed(k));
}

/// gamma_s^-1(g) = (p(g), s(p(g))^-1 g).
inline std::pair<Point, Point> gamma_s_inv(const Section& s, const Point& g) {
  const auto& G = *s.sub->ambient;
  const Point x = s.sub->projection(g);
  const Point k = G.product(G.inverse(s(x)), g);
  return {x, detail::require_in_k(*s.sub, k, "gamma_s_inv")};
}

/// (x, k)(x', k') = (x x', kappa_s(x, x')^-1 k_{s(x')} k') with k_{s(x')} = s(x')^-1 k s(x').
inline std::pair<Point, Point> coord_product(const Section& s, const Point& x, const Point& k, const Point& xp,
                                             const Point& kp) {
  const auto& G = *s.sub->ambient;
  const auto& K = *s.sub->subgroup;
  const Point sxp = s(xp);
  const Point conj = G.product(G.product(G.inverse(sxp), s.sub->embed(k)), sxp);
  const Point kc = detail::require_in_k(*s.sub, conj, "coord_product");
  const Point kappa = kappa_from_section(s, x, xp);
  return {s.sub->quotient->product(x, xp), K.product(K.product(K.inverse(kappa), kc), kp)};
}

// --- Haar decomposition ----------------------------------------------------------

struct QuadratureComparison {
  double lhs = 0.0;
  double rhs = 0.0;
  double relerr = 0.0;
};

inline double relative_error(double lhs, double rhs) {
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

/// int_G f dmu_G against int_{X x K} f(s(x) k) dmu_X dmu_K.
template <class F>
QuadratureComparison decompose_check(F&& f, const Section& s, const QuadratureGrid& grid_G,
                                     const QuadratureGrid& grid_X, const QuadratureGrid& grid_K) {
  QuadratureComparison out;
  out.lhs = grid_G.integrate([&](const Point& g) { return f(g); });
  std::vector<double> rows(grid_X.size());
  parallel_for(grid_X.size(), [&](std::size_t i) {
    const Point sx = s(grid_X.nodes[i]);
    rows[i] = grid_X.weights[i] * grid_K.integrate([&](const Point& k) {
      return f(s.sub->ambient->product(sx, s.sub->embed(k)));
    });
  });
  out.rhs = pairwise_sum(rows);
  out.relerr = relative_error(out.lhs, out.rhs);
  return out;
}

// --- densities rho -------------------------------------------------------------

enum class RhoKind { gaussian, bump };

inline RhoKind parse_rho_kind(const std::string& name) {
  if (name == "gaussian") return RhoKind::gaussian;
  if (name == "bump" || name == "compact_bump") return RhoKind::bump;
  throw InvalidArgument("make_rho: unknown density kind '" + name +
                        "' (a constant density has divergent K-integral and is not a member of the class)");
}

inline std::string to_string(RhoKind k) { return k == RhoKind::gaussian ? "gaussian" : "bump"; }

/// Normalized one-dimensional profile w with int w = 1.
class Profile {
 public:
  Profile(RhoKind kind, double width) : kind_(kind), width_(width) {
    if (!(width > 0.0)) throw InvalidArgument("make_rho: width must be positive");
    if (kind == RhoKind::bump) {
      boost::math::quadrature::tanh_sinh<double> integrator;
      const double Z = integrator.integrate([](double u) { return bump_core(u); }, -1.0, 1.0);
      norm_ = 1.0 / (Z * width);
    } else {
      norm_ = 1.0 / (width * std::sqrt(two_pi));
    }
  }

  double operator()(double k) const {
    const double u = k / width_;
    return norm_ * (kind_ == RhoKind::gaussian ? std::exp(-0.5 * u * u) : bump_core(u));
  }

  /// Half-width of a K-box whose complement carries mass below 1e-13.
  double support() const { return kind_ == RhoKind::gaussian ? 8.5 * width_ : width_; }

  RhoKind kind() const { return kind_; }
  double width() const { return width_; }

 private:
  static double bump_core(double u) {
    const double r = 1.0 - u * u;
    return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
  }

  RhoKind kind_;
  double width_;
  double norm_ = 1.0;
};

/// A density rho on G with int_K rho(g k) dmu_K(k) = 1 for all g.
struct RhoDensity {
  std::string label;
  Subgroup sub;
  std::function<double(const Point&)> eval;

  double operator()(const Point& g) const { return eval(g); }
};

/// rho(g) = prod_i w(k_i) where k = K-part of gamma_s^-1(g) for the reference section s.
inline RhoDensity make_rho(RhoKind kind, const Section& s, double width = 1.0) {
  const Profile w(kind, width);
  RhoDensity rho;
  rho.label = to_string(kind) + "(width=" + std::to_string(width) + ", section=" + s.name + ")";
  rho.sub = s.sub;
  rho.eval = [w, s](const Point& g) {
    const Point k = gamma_s_inv(s, g).second;
    double v = 1.0;
    for (double ki : k) v *= w(ki);
    return v;
  };
  return rho;
}

inline RhoDensity make_rho(const std::string& kind, const Section& s, double width = 1.0) {
  return make_rho(parse_rho_kind(kind), s, width);
}

/// rho^g(g') = rho(g g').
inline RhoDensity translate_rho(const RhoDensity& rho, const Point& g) {
  RhoDensity out = rho;
  out.label = rho.label + " translated";
  out.eval = [rho, g](const Point& h) { return rho(rho.sub->ambient->product(g, h)); };
  return out;
}

/// alpha rho1 + (1 - alpha) rho2.
inline RhoDensity mix_rho(const RhoDensity& a, const RhoDensity& b, double alpha) {
  RhoDensity out = a;
  out.label = "mix(" + a.label + ", " + b.label + ")";
  out.eval = [a, b, alpha](const Point& g) { return alpha * a(g) + (1.0 - alpha) * b(g); };
  return out;
}

/// Max over x of |int_K rho(s(x) k) dmu_K(k) - 1|.
inline double rho_validate(const RhoDensity& rho, const Section& s, const std::vector<Point>& xs,
                           const QuadratureGrid& grid_K) {
  std::vector<double> defect(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) {
    const Point sx = s(xs[i]);
    const double v = grid_K.integrate([&](const Point& k) {
      return rho(s.sub->ambient->product(sx, s.sub->embed(k)));
    });
    defect[i] = std::abs(v - 1.0);
  });
  return defect.empty() ? 0.0 : *std::max_element(defect.begin(), defect.end());
}

/// int_G f dmu_{G,K} = int_G f rho dmu_G on a chart grid.
template <class F>
double integrate_mod_K(F&& f, const RhoDensity& rho, const QuadratureGrid& grid_G) {
  std::vector<double> t(grid_G.size());
  parallel_for(grid_G.size(), [&](std::size_t i) {
    t[i] = f(grid_G.nodes[i]) * rho(grid_G.nodes[i]) * grid_G.weights[i];
  });
  return pairwise_sum(t);
}

struct NestedIntegral {
  std::vector<double> scales;
  std::vector<double> values;
  double value = 0.0;
  double tail = 0.0;
  bool converged = false;
};

/// integrate_mod_K on K-boxes scaled by 1, 2, 4, ...; converged when the last
/// doubling changes the value by less than tol relative.
template <class F>
NestedIntegral integrate_mod_K_nested(F&& f, const RhoDensity& rho, const Box& box,
                                      const std::vector<std::size_t>& resolution, std::size_t doublings,
                                      double tol = 1e-10) {
  const auto& G = *rho.sub->ambient;
  NestedIntegral out;
  double scale = 1.0;
  for (std::size_t d = 0; d <= doublings; ++d, scale *= 2.0) {
    Box b = box;
    std::vector<std::size_t> res = resolution;
    for (std::size_t i = 0; i < rho.sub->k_axes.size(); ++i) {
      const std::size_t ax = rho.sub->k_axes[i];
      const double c = 0.5 * (box[ax].first + box[ax].second), h = 0.5 * (box[ax].second - box[ax].first);
      b[ax] = {c - scale * h, c + scale * h};
      res[ax] = static_cast<std::size_t>(scale) * resolution[ax];
    }
    out.scales.push_back(scale);
    out.values.push_back(integrate_mod_K(f, rho, haar_grid(G, b, res)));
  }
  out.value = out.values.back();
  const std::size_t m = out.values.size();
  out.tail = m > 1 ? std::abs(out.values[m - 1] - out.values[m - 2]) : unbounded;
  out.converged = out.tail <= tol * std::max(std::abs(out.value), 1e-300) || (out.value == 0.0 && out.tail == 0.0);
  return out;
}

/// |int (f o L_g) rho dmu - int f rho^{g^-1} dmu| relative, the left invariance of M_{G,K}.
template <class F>
double mod_K_left_invariance_defect(F&& f, const RhoDensity& rho, const Point& g, const QuadratureGrid& grid_G) {
  const auto& G = *rho.sub->ambient;
  const double lhs = integrate_mod_K([&](const Point& h) { return f(G.product(g, h)); }, rho, grid_G);
  const double rhs = integrate_mod_K(f, translate_rho(rho, G.inverse(g)), grid_G);
  return relative_error(lhs, rhs);
}

// --- non-compactness of the center ---------------------------------------------------

struct DivergenceProbe {
  std::vector<double> radii;
  std::vector<double> partial;
  double slope = 0.0;
  double x_integral = 0.0;
  double slope_relerr = 0.0;
};

/// Partial integrals of |c^U|^2 over |k| <= R times the X-box, for each R.
inline DivergenceProbe center_divergence_probe(const WhRep& U, const DiscretizedState& psi, const DiscretizedState& phi,
                                               const std::vector<double>& radii, const Box& x_box,
                                               const std::vector<std::size_t>& x_res, double k_density = 4.0) {
  const std::size_t n = (U.group()->dim - 1) / 2;
  DivergenceProbe out;
  out.radii = radii;
  for (double R : radii) {
    if (!(R > 0.0)) throw InvalidArgument("center_divergence_probe: radii must be positive");
    Box box{{-R, R}};
    std::vector<std::size_t> res{std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(2.0 * R * k_density)))};
    for (std::size_t i = 0; i < 2 * n; ++i) {
      box.push_back(x_box[i]);
      res.push_back(x_res[i]);
    }
    const auto grid = haar_grid(*U.group(), box, res);
    const auto c = U.coefficients(psi, phi, grid.nodes);
    std::vector<double> t(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) t[i] = std::norm(c[i]) * grid.weights[i];
    out.partial.push_back(pairwise_sum(t));
  }
  const auto sub = make_wh_center(n, U.kcheck());
  const auto P = projective_from_section(wh_rep(n, U.kcheck()), wh_section_s(sub));
  const auto xgrid = haar_grid(*sub->quotient, x_box, x_res);
  const auto cx = P->coefficients(psi, phi, xgrid.nodes);
  std::vector<double> tx(cx.size());
  for (std::size_t i = 0; i < cx.size(); ++i) tx[i] = std::norm(cx[i]) * xgrid.weights[i];
  out.x_integral = pairwise_sum(tx);
  // Least-squares slope of partial(R) = slope * 2R through the origin.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    num += 2.0 * radii[i] * out.partial[i];
    den += 4.0 * radii[i] * radii[i];
  }
  out.slope = den > 0.0 ? num / den : 0.0;
  out.slope_relerr = relative_error(out.slope, out.x_integral);
  return out;
}

}  // namespace sqint

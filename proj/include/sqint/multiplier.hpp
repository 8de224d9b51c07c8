#pragma once

// T-valued multipliers, sections of quotient maps G -> X = G/K, the cocycles
// they induce, and central extensions of X by the circle.

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sqint/group.hpp"

namespace sqint {

/// A closed normal subgroup K of G sitting on coordinate axes of G's chart,
/// with the quotient X = G/K and a unitary character chi of K (as a phase).
struct RelCentralSubgroup {
  std::string name;
  Group ambient;
  Group quotient;
  Group subgroup;
  std::vector<std::size_t> k_axes;
  std::function<Point(const Point&)> projection;
  std::function<double(const Point&)> character;
  double membership_tol = 1e-10;

  Point embed(const Point& k) const {
    Point g = ambient->identity;
    for (std::size_t i = 0; i < k_axes.size(); ++i) g[k_axes[i]] = k[i];
    return g;
  }

  Point k_part(const Point& g) const {
    Point k(k_axes.size());
    for (std::size_t i = 0; i < k_axes.size(); ++i) k[i] = g[k_axes[i]];
    return k;
  }

  /// Max deviation of the non-K chart coordinates from the identity.
  double offset_from_subgroup(const Point& g) const {
    double d = 0.0;
    for (std::size_t i = 0; i < ambient->dim; ++i) {
      if (std::find(k_axes.begin(), k_axes.end(), i) != k_axes.end()) continue;
      d = std::max(d, std::abs(g[i] - ambient->identity[i]));
    }
    return d;
  }

  bool in_subgroup(const Point& g) const { return offset_from_subgroup(g) <= membership_tol; }

  /// g[x] = p(g s(x)) for any section; computed through the quotient law.
  Point act(const Point& g, const Point& x) const { return quotient->product(projection(g), x); }
};

using Subgroup = std::shared_ptr<const RelCentralSubgroup>;

/// Borel (here smooth) section s: X -> G of the projection, s(e_X) = e_G.
struct Section {
  std::string name;
  Subgroup sub;
  std::function<Point(const Point&)> map;

  Point operator()(const Point& x) const { return map(x); }
};

/// m(x, y) = exp(i phase(x, y)).
struct Multiplier {
  std::string label;
  Group base;
  std::function<double(const Point&, const Point&)> phase;

  cplx operator()(const Point& x, const Point& y) const { return unit(phase(x, y)); }
};

// --- cocycles ---------------------------------------------------------------

namespace detail {

inline Point require_in_k(const RelCentralSubgroup& K, const Point& g, const char* what) {
  const double off = K.offset_from_subgroup(g);
  if (off > K.membership_tol) {
    throw ConsistencyError(std::string(what) + ": result leaves K by " + std::to_string(off) +
                           " (inconsistent section)");
  }
  return K.k_part(g);
}

}  // namespace detail

/// kappa_s(x1, x2) = (s(x1) s(x2))^-1 s(x1 x2), returned in K's chart.
inline Point kappa_from_section(const Section& s, const Point& x1, const Point& x2) {
  const auto& G = *s.sub->ambient;
  const auto& X = *s.sub->quotient;
  const Point g = G.product(G.inverse(G.product(s(x1), s(x2))), s(X.product(x1, x2)));
  return detail::require_in_k(*s.sub, g, "kappa_from_section");
}

/// c_s(g, x) = s(x)^-1 g^-1 s(g[x]), returned in K's chart.
inline Point section_cocycle(const Section& s, const Point& g, const Point& x) {
  const auto& G = *s.sub->ambient;
  const Point gx = s.sub->act(g, x);
  const Point c = G.product(G.product(G.inverse(s(x)), G.inverse(g)), s(gx));
  return detail::require_in_k(*s.sub, c, "section_cocycle");
}

/// Max distance of kappa_s(x1, x2) from K over random pairs drawn from `x_box`.
inline double kappa_defect(const Section& s, const Box& x_box, std::size_t trials, Rng& rng) {
  const auto& G = *s.sub->ambient;
  const auto& X = *s.sub->quotient;
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point x1 = rng.uniform_point(x_box), x2 = rng.uniform_point(x_box);
    const Point g = G.product(G.inverse(G.product(s(x1), s(x2))), s(X.product(x1, x2)));
    worst = std::max(worst, s.sub->offset_from_subgroup(g));
  }
  return worst;
}

/// Max distance of c_s(g, x) from K over random g in `g_box` and x in `x_box`.
inline double section_cocycle_defect(const Section& s, const Box& g_box, const Box& x_box, std::size_t trials,
                                     Rng& rng) {
  const auto& G = *s.sub->ambient;
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point g = rng.uniform_point(g_box), x = rng.uniform_point(x_box);
    const Point c = G.product(G.product(G.inverse(s(x)), G.inverse(g)), s(s.sub->act(g, x)));
    worst = std::max(worst, s.sub->offset_from_subgroup(c));
  }
  return worst;
}

/// m_s(x1, x2) = chi(kappa_s(x1, x2)).
inline Multiplier multiplier_from_section(const Section& s) {
  Multiplier m;
  m.label = "m_" + s.name;
  m.base = s.sub->quotient;
  m.phase = [s](const Point& x1, const Point& x2) { return s.sub->character(kappa_from_section(s, x1, x2)); };
  return m;
}

inline Multiplier trivial_multiplier(Group X) {
  return {"trivial", std::move(X), [](const Point&, const Point&) { return 0.0; }};
}

/// m*(x, y) = m(x, y)^-1.
inline Multiplier conjugate(const Multiplier& m) {
  Multiplier c;
  c.label = m.label.ends_with("*") ? m.label.substr(0, m.label.size() - 1) : m.label + "*";
  c.base = m.base;
  c.phase = [ph = m.phase](const Point& x, const Point& y) { return -ph(x, y); };
  return c;
}

/// Max phase defect of normalization and of the 2-cocycle identity
/// m(g1, g2 g3) m(g2, g3) = m(g1 g2, g3) m(g1, g2) over random triples.
inline double check_cocycle(const Multiplier& m, const Box& box, std::size_t trials, Rng& rng) {
  const auto& X = *m.base;
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point a = rng.uniform_point(box), b = rng.uniform_point(box), c = rng.uniform_point(box);
    worst = std::max({worst, phase_distance(m.phase(a, X.identity), 0.0),
                      phase_distance(m.phase(X.identity, a), 0.0)});
    const double lhs = m.phase(a, X.product(b, c)) + m.phase(b, c);
    const double rhs = m.phase(X.product(a, b), c) + m.phase(a, b);
    worst = std::max(worst, phase_distance(lhs, rhs));
  }
  return worst;
}

/// Max defect of m(x, y) = beta(xy) beta(x)^-1 beta(y)^-1 m'(x, y), beta as a phase.
inline double similar(const Multiplier& m, const Multiplier& mp, const std::function<double(const Point&)>& beta,
                      const Box& box, std::size_t trials, Rng& rng) {
  const auto& X = *m.base;
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point x = rng.uniform_point(box), y = rng.uniform_point(box);
    const double rhs = beta(X.product(x, y)) - beta(x) - beta(y) + mp.phase(x, y);
    worst = std::max(worst, phase_distance(m.phase(x, y), rhs));
  }
  return worst;
}

/// Central extension X_m on T x X, chart (theta, x), with
/// (theta, x)(theta', y) = (theta + theta' + phase m(x, y), x y).
/// Haar: (1/2 pi) dtheta (x) mu_X, so the circle has total mass one.
inline Group central_extension(const Group& X, const Multiplier& m) {
  auto G = std::make_shared<GroupDescriptor>();
  G->name = X->name + "_ext[" + m.label + "]";
  G->dim = X->dim + 1;
  G->coords = {"theta"};
  for (const auto& c : X->coords) G->coords.push_back(c);
  G->periods = {two_pi};
  for (double p : X->periods) G->periods.push_back(p);
  G->identity = {0.0};
  for (double v : X->identity) G->identity.push_back(v);

  auto split = [](const Point& g) { return Point(g.begin() + 1, g.end()); };
  auto join = [](double theta, const Point& x) {
    Point g{theta};
    g.insert(g.end(), x.begin(), x.end());
    return g;
  };
  auto wrap = [](double theta) {
    double t = std::fmod(theta, two_pi);
    return t < 0.0 ? t + two_pi : t;
  };
  G->product = [=, ph = m.phase](const Point& g, const Point& h) {
    const Point x = split(g), y = split(h);
    return join(wrap(g[0] + h[0] + ph(x, y)), X->product(x, y));
  };
  G->inverse = [=, ph = m.phase](const Point& g) {
    const Point x = split(g);
    const Point xi = X->inverse(x);
    return join(wrap(-g[0] - ph(x, xi)), xi);
  };
  G->haar_density = [=](const Point& g) { return X->haar_density(split(g)) / two_pi; };
  G->modular = [=](const Point& g) { return X->modular(split(g)); };
  G->domain = [=](const Point& g) { return X->contains(split(g)); };
  G->product_law = "(theta + theta' + arg m(x, x'), x x') with m = " + m.label + " on " + X->name;
  G->inverse_law = "(-theta - arg m(x, x^-1), x^-1)";
  G->haar_law = "(1/2 pi) dtheta (x) [" + X->haar_law + "]";
  G->modular_law = "Delta_X(x) = " + X->modular_law;
  return G;
}

// --- concrete quotients and sections -----------------------------------------

/// Center K = {(k, 0, 0)} of the polarized Weyl-Heisenberg group with chi(k) = e^{i kcheck k}.
inline Subgroup make_wh_center(std::size_t n, double kcheck) {
  auto K = std::make_shared<RelCentralSubgroup>();
  K->name = "wh_center";
  K->ambient = make_polarized_wh(n);
  K->quotient = make_wh_phase_space(n);
  K->subgroup = make_vector_group("center", {"k"});
  K->k_axes = {0};
  K->projection = [](const Point& g) { return Point(g.begin() + 1, g.end()); };
  K->character = [kcheck](const Point& k) { return kcheck * k[0]; };
  return K;
}

/// s(p, q) = (0, p, q).
inline Section wh_section_s(Subgroup K) {
  return {"s", std::move(K), [](const Point& x) {
            Point g{0.0};
            g.insert(g.end(), x.begin(), x.end());
            return g;
          }};
}

/// s'(p, q) = (p.q/2, p, q).
inline Section wh_section_s_prime(Subgroup K) {
  return {"s'", std::move(K), [](const Point& x) {
            const std::size_t n = x.size() / 2;
            Point g{0.5 * detail::dot_range(x, 0, x, n, n)};
            g.insert(g.end(), x.begin(), x.end());
            return g;
          }};
}

/// K = T x S x R inside the exotic group; chi(t, s, r) = e^{i(t + k.r)}.
inline Subgroup make_exotic_tsr(std::size_t n, const Point& kvec) {
  if (kvec.size() != n) throw InvalidArgument("make_exotic_tsr: k vector must have n entries");
  auto K = std::make_shared<RelCentralSubgroup>();
  K->name = "exotic_tsr";
  K->ambient = make_exotic(n);
  K->quotient = make_exotic_quotient(n);
  std::vector<std::string> kc{"t", "s"};
  for (auto& c : detail::indexed("r", n)) kc.push_back(c);
  K->subgroup = make_vector_group("tsr", kc);
  K->k_axes = {0, 1};
  for (std::size_t i = 0; i < n; ++i) K->k_axes.push_back(3 + 2 * n + i);
  K->projection = [n](const Point& g) {
    Point x(2 * n + 2);
    for (std::size_t i = 0; i < 2 * n; ++i) x[i] = g[3 + i];
    x[2 * n] = g[2];
    x[2 * n + 1] = g[3 + 3 * n];
    return x;
  };
  K->character = [kvec, n](const Point& k) {
    double ph = k[0];
    for (std::size_t i = 0; i < n; ++i) ph += kvec[i] * k[2 + i];
    return ph;
  };
  return K;
}

/// s(p, q, b, a) = (0, 0, b, p, q, 0, a).
inline Section exotic_section(Subgroup K) {
  const std::size_t n = (K->quotient->dim - 2) / 2;
  return {"s", std::move(K), [n](const Point& x) {
            Point g(3 * n + 4, 0.0);
            g[2] = x[2 * n];
            for (std::size_t i = 0; i < 2 * n; ++i) g[3 + i] = x[i];
            g[3 + 3 * n] = x[2 * n + 1];
            return g;
          }};
}

/// A second exotic section, s'(p, q, b, a) = (p.q/2, 0, b, p, q, 0, a).
inline Section exotic_section_shifted(Subgroup K) {
  const std::size_t n = (K->quotient->dim - 2) / 2;
  Section s = exotic_section(K);
  s.name = "s'";
  s.map = [base = s.map, n](const Point& x) {
    Point g = base(x);
    g[0] = 0.5 * detail::dot_range(x, 0, x, n, n);
    return g;
  };
  return s;
}

/// upsilon(x) = s(x)^-1 s'(x), the K-valued transition between two sections.
inline Point section_transition(const Section& s, const Section& sp, const Point& x) {
  const auto& G = *s.sub->ambient;
  return detail::require_in_k(*s.sub, G.product(G.inverse(s(x)), sp(x)), "section_transition");
}

/// Max defect of the normality of K: g k g^-1 in K.
inline double normality_defect(const RelCentralSubgroup& K, const Box& g_box, const Box& k_box, std::size_t trials,
                               Rng& rng) {
  const auto& G = *K.ambient;
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const Point g = rng.uniform_point(g_box);
    const Point k = K.embed(rng.uniform_point(k_box));
    worst = std::max(worst, K.offset_from_subgroup(G.product(G.product(g, k), G.inverse(g))));
  }
  return worst;
}

}  // namespace sqint

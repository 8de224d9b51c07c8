#pragma once

// Generalized wavelet / coherent-state transforms: analysis over a Haar grid,
// Duflo-Moore operators, admissibility by nested boxes, orthogonality and
// reproducing-kernel checks, synthesis, and semi-invariance.

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqint/group.hpp"
#include "sqint/induced.hpp"
#include "sqint/measures.hpp"
#include "sqint/representation.hpp"
#include "sqint/state.hpp"

namespace sqint {

struct TransformResult {
  QuadratureGrid grid;
  std::vector<cplx> coefficients;
  std::string group;
  std::vector<std::string> coords;
  std::string rep;
  std::string psi_id;
  std::optional<double> dm_norm;
  /// Nodes removed because they left the representation's safe box.
  std::size_t clipped_nodes = 0;
  Box safe_box;
  /// Energy carried by the outermost shell of the grid, relative to the total.
  double tail_estimate = 0.0;

  double energy() const {
    std::vector<double> t(coefficients.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(coefficients[i]) * grid.weights[i];
    return pairwise_sum(t);
  }
};

namespace detail {

inline bool inside(const Box& box, const Point& x) {
  for (std::size_t i = 0; i < box.size(); ++i) {
    if (x[i] < box[i].first || x[i] > box[i].second) return false;
  }
  return true;
}

/// Fraction of sum |c|^2 w carried by nodes in the outermost cell layer of any bounded axis.
inline double shell_fraction(const QuadratureGrid& grid, const std::vector<cplx>& c) {
  double total = 0.0, shell = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double e = std::norm(c[i]) * grid.weights[i];
    total += e;
    bool edge = false;
    for (std::size_t ax = 0; ax < grid.axes.size() && !edge; ++ax) {
      if (grid.resolution[ax] < 3) continue;
      const double v = grid.nodes[i][ax];
      edge = v == grid.axes[ax].front() || v == grid.axes[ax].back();
    }
    if (edge) shell += e;
  }
  return total > 0.0 ? shell / total : 0.0;
}

}  // namespace detail

/// Coefficients c(g) = <U(g) psi, phi> over the grid nodes inside the safe box.
inline TransformResult analyze(const Representation& rep, const DiscretizedState& psi, const DiscretizedState& phi,
                               const QuadratureGrid& grid, std::string psi_id = "psi",
                               std::optional<double> dm_norm = std::nullopt) {
  if (!(psi.norm() > 0.0)) throw InvalidArgument("analyze: analyzing vector is zero");
  psi.require_compatible(phi, "analyze");
  TransformResult r;
  r.safe_box = rep.safe_box(psi);
  r.grid = grid;
  r.grid.nodes.clear();
  r.grid.weights.clear();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (detail::inside(r.safe_box, grid.nodes[i])) {
      r.grid.nodes.push_back(grid.nodes[i]);
      r.grid.weights.push_back(grid.weights[i]);
    } else {
      ++r.clipped_nodes;
    }
  }
  if (r.grid.nodes.empty()) throw InvalidArgument("analyze: grid lies outside the representation's safe box");
  r.coefficients = rep.coefficients(psi, phi, r.grid.nodes);
  r.group = rep.group()->name;
  r.coords = rep.group()->coords;
  r.rep = rep.label();
  r.psi_id = std::move(psi_id);
  r.dm_norm = dm_norm;
  r.tail_estimate = detail::shell_fraction(r.grid, r.coefficients);
  return r;
}

// --- Duflo-Moore operators ---------------------------------------------------------

struct DMOperator {
  enum class Kind { identity_scalar, fourier_multiplier, coordinate_multiplier };

  Kind kind = Kind::identity_scalar;
  double scalar = 1.0;
  /// Symbol as a function of |omega| (fourier) or of the coordinate on `axis` (coordinate).
  std::function<double(double)> symbol;
  std::size_t axis = 0;
  std::string description;

  /// D v; throws InvalidArgument when v is not in the domain of D on this grid.
  DiscretizedState apply(const DiscretizedState& v) const {
    switch (kind) {
      case Kind::identity_scalar:
        return cplx(scalar) * v;
      case Kind::coordinate_multiplier: {
        DiscretizedState out = v;
        const auto& g = v.grid();
        const std::size_t stride = g.stride(axis), N = g.count[axis];
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scalar * symbol(g.coord(axis, (i / stride) % N));
        return out;
      }
      case Kind::fourier_multiplier: {
        auto S = spectrum(v);
        const auto& g = v.grid();
        double peak = 0.0;
        for (const auto& s : S) peak = std::max(peak, std::abs(s));
        for (std::size_t i = 0; i < S.size(); ++i) {
          const auto idx = g.unflatten(i);
          double w2 = 0.0;
          for (std::size_t ax = 0; ax < g.rank(); ++ax) w2 += std::pow(g.frequency(ax, idx[ax]), 2);
          const double w = std::sqrt(w2);
          if (w == 0.0) {
            if (std::abs(S[i]) > 1e-9 * peak) {
              throw InvalidArgument("Duflo-Moore: vector has nonzero mean and lies outside the domain of D");
            }
            S[i] = 0.0;
            continue;
          }
          S[i] *= scalar * symbol(w);
        }
        return from_spectrum(g, std::move(S));
      }
    }
    return v;
  }

  bool in_domain(const DiscretizedState& v) const {
    try {
      apply(v);
      return true;
    } catch (const InvalidArgument&) {
      return false;
    }
  }
};

/// Gabor: X unimodular, D = |kcheck|^{-n/2} Id under mu_X = dp dq/(2 pi)^n.
inline DMOperator duflo_moore_gabor(double kcheck = -1.0, std::size_t n = 1) {
  DMOperator D;
  D.kind = DMOperator::Kind::identity_scalar;
  D.scalar = std::pow(std::abs(kcheck), -0.5 * static_cast<double>(n));
  D.symbol = [s = D.scalar](double) { return s; };
  D.description = "identity_scalar";
  return D;
}

/// Affine: D = C |omega|^{-n/2}; C is the calibration constant.
inline DMOperator duflo_moore_affine(double C = 1.0, std::size_t n = 1) {
  DMOperator D;
  D.kind = DMOperator::Kind::fourier_multiplier;
  D.scalar = C;
  const double e = -0.5 * static_cast<double>(n);
  D.symbol = [e](double w) { return std::pow(w, e); };
  D.description = "fourier_multiplier |omega|^(-n/2)";
  return D;
}

/// Exotic group: multiplication by bc^{-1/2} on L^2(db dp).
inline DMOperator duflo_moore_exotic() {
  DMOperator D;
  D.kind = DMOperator::Kind::coordinate_multiplier;
  D.scalar = 1.0;
  D.axis = 0;
  D.symbol = [](double b) { return 1.0 / std::sqrt(b); };
  D.description = "coordinate_multiplier bc^(-1/2)";
  return D;
}

inline DMOperator duflo_moore(const std::string& config, double affine_C = std::sqrt(pi)) {
  if (config == "gabor") return duflo_moore_gabor();
  if (config == "affine") return duflo_moore_affine(affine_C);
  if (config == "exotic") return duflo_moore_exotic();
  throw InvalidArgument("duflo_moore: unknown configuration '" + config + "'");
}

/// Symbol values of a coordinate multiplier along the node sequence h_m / 2, h_m = h / 2^m.
struct SymbolGrowth {
  std::vector<double> nodes;
  std::vector<double> values;
  double min_ratio = 0.0;
};

inline SymbolGrowth symbol_growth(const DMOperator& D, double h, std::size_t halvings) {
  if (!(h > 0.0) || halvings == 0) throw InvalidArgument("symbol_growth: need h > 0 and at least one halving");
  SymbolGrowth out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m <= halvings; ++m) {
    const double node = 0.5 * std::ldexp(h, -static_cast<int>(m));
    out.nodes.push_back(node);
    out.values.push_back(D.scalar * D.symbol(node));
    if (m > 0) out.min_ratio = std::min(out.min_ratio, out.values[m] / out.values[m - 1]);
  }
  return out;
}

/// <D psi2, D psi1>.
inline cplx dm_inner(const DMOperator& D, const DiscretizedState& psi2, const DiscretizedState& psi1) {
  return inner(D.apply(psi2), D.apply(psi1));
}

// --- orthogonality ------------------------------------------------------------------

struct OrthoResult {
  cplx lhs;
  cplx rhs;
  double relerr = 0.0;
  double abs_err = 0.0;
};

inline OrthoResult compare(cplx lhs, cplx rhs) {
  OrthoResult r{lhs, rhs, 0.0, std::abs(lhs - rhs)};
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  r.relerr = scale > 0.0 ? r.abs_err / scale : 0.0;
  return r;
}

/// sum conj(c_{psi1,phi1}) c_{psi2,phi2} w against <phi1, phi2> <D psi2, D psi1>.
inline OrthoResult orthogonality_check(const Representation& rep, const DiscretizedState& psi1,
                                       const DiscretizedState& psi2, const DiscretizedState& phi1,
                                       const DiscretizedState& phi2, const DMOperator& D, const QuadratureGrid& grid) {
  const cplx dm = dm_inner(D, psi2, psi1);
  const auto c1 = rep.coefficients(psi1, phi1, grid.nodes);
  const auto c2 = rep.coefficients(psi2, phi2, grid.nodes);
  std::vector<cplx> t(c1.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(c1[i]) * c2[i] * grid.weights[i];
  return compare(pairwise_sum(t), inner(phi1, phi2) * dm);
}

/// Least-squares scale C^2 with sum_i |lhs_i - C^2 rhs_i|^2 minimal, rhs_i computed with D at C = 1.
struct Calibration {
  double C_sq = 0.0;
  double C = 0.0;
  double residual = 0.0;
  std::vector<cplx> lhs;
  std::vector<cplx> rhs;
};

struct VectorPair {
  DiscretizedState psi;
  DiscretizedState phi;
};

inline Calibration calibrate_dm(const Representation& rep, const DMOperator& unit_D, const std::vector<VectorPair>& pairs,
                                const QuadratureGrid& grid) {
  Calibration cal;
  double num = 0.0, den = 0.0;
  for (const auto& pr : pairs) {
    const auto o = orthogonality_check(rep, pr.psi, pr.psi, pr.phi, pr.phi, unit_D, grid);
    cal.lhs.push_back(o.lhs);
    cal.rhs.push_back(o.rhs);
    num += std::real(std::conj(o.rhs) * o.lhs);
    den += std::norm(o.rhs);
  }
  if (!(den > 0.0)) throw InvalidArgument("calibrate_dm: degenerate calibration pairs");
  cal.C_sq = num / den;
  cal.C = std::sqrt(cal.C_sq);
  double res = 0.0;
  for (std::size_t i = 0; i < cal.lhs.size(); ++i) res = std::max(res, std::abs(cal.lhs[i] - cal.C_sq * cal.rhs[i]) / std::abs(cal.lhs[i]));
  cal.residual = res;
  return cal;
}

// --- admissibility ---------------------------------------------------------------------

enum class AdmissibilityStatus { admissible, divergent, inconclusive };

inline std::string to_string(AdmissibilityStatus s) {
  switch (s) {
    case AdmissibilityStatus::admissible:
      return "admissible";
    case AdmissibilityStatus::divergent:
      return "divergent";
    case AdmissibilityStatus::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

struct Admissibility {
  AdmissibilityStatus status = AdmissibilityStatus::inconclusive;
  bool admissible = false;
  /// Limit of int |c_{psi,psi}|^2 / ||psi||^2; only meaningful when admissible.
  std::optional<double> dm_norm_sq;
  std::vector<double> estimates;
  std::vector<double> increments;
  double final_relative_increment = 0.0;
};

/// Estimates int |c_{psi,psi}|^2 dmu / ||psi||^2 over nested grids grids(0), grids(1), ...
inline Admissibility admissibility(const Representation& rep, const DiscretizedState& psi,
                                   const std::function<QuadratureGrid(std::size_t)>& grids, std::size_t levels,
                                   double tol = 1e-3) {
  if (!(psi.norm() > 0.0)) throw InvalidArgument("admissibility: zero vector");
  if (levels < 3) throw InvalidArgument("admissibility: at least three nested levels are required");
  Admissibility a;
  const double n2 = psi.norm_sq();
  for (std::size_t l = 0; l < levels; ++l) {
    const auto grid = grids(l);
    const auto c = rep.coefficients(psi, psi, grid.nodes);
    std::vector<double> t(c.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::norm(c[i]) * grid.weights[i];
    a.estimates.push_back(pairwise_sum(t) / n2);
    if (l > 0) a.increments.push_back(a.estimates[l] - a.estimates[l - 1]);
  }
  const std::size_t m = a.increments.size();
  a.final_relative_increment = std::abs(a.increments.back()) / a.estimates.back();
  const double ratio = std::abs(a.increments[m - 1]) / std::max(std::abs(a.increments[m - 2]), 1e-300);
  if (a.final_relative_increment < tol) {
    a.status = AdmissibilityStatus::admissible;
    a.admissible = true;
    a.dm_norm_sq = a.estimates.back();
  } else if (ratio > 0.5) {
    a.status = AdmissibilityStatus::divergent;
  } else {
    a.status = AdmissibilityStatus::inconclusive;
  }
  return a;
}

// --- kernel, reproduction, synthesis ------------------------------------------------------

/// kappa(g, g') = ||D psi||^-2 <U(g) psi, U(g') psi>.
inline cplx kernel(const Representation& rep, const DiscretizedState& psi, const Point& g, const Point& gp,
                   double dm_norm) {
  if (!(dm_norm > 0.0)) throw InvalidArgument("kernel: Duflo-Moore norm unset");
  return inner(rep.apply(g, psi), rep.apply(gp, psi)) / (dm_norm * dm_norm);
}

struct ReproduceResult {
  std::vector<std::size_t> sampled;
  std::vector<cplx> reproduced;
  double max_relerr = 0.0;
};

/// Integrates the kernel against the coefficients at the sampled nodes:
/// f~(g) = sum_g' kappa(g, g') c(g') w(g'), and compares with c(g).
inline ReproduceResult reproduce_check(const TransformResult& result, const Representation& rep,
                                       const DiscretizedState& psi, const std::vector<std::size_t>& sampled) {
  if (!result.dm_norm) throw InvalidArgument("reproduce_check: Duflo-Moore norm unset");
  const double dm2 = *result.dm_norm * *result.dm_norm;
  ReproduceResult out;
  out.sampled = sampled;
  out.reproduced.resize(sampled.size());
  for (std::size_t j = 0; j < sampled.size(); ++j) {
    const Point& g = result.grid.nodes[sampled[j]];
    // kappa(g, g') = conj(<U(g') psi, U(g) psi>) / ||D psi||^2, one row per coefficient call.
    const auto row = rep.coefficients(psi, rep.apply(g, psi), result.grid.nodes);
    std::vector<cplx> t(row.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::conj(row[i]) / dm2 * result.coefficients[i] * result.grid.weights[i];
    out.reproduced[j] = pairwise_sum(t);
    const cplx ref = result.coefficients[sampled[j]];
    out.max_relerr = std::max(out.max_relerr, std::abs(out.reproduced[j] - ref) / std::abs(ref));
  }
  return out;
}

/// Applies the discrete reproducing operator to the whole coefficient table.
inline TransformResult reproduce(const TransformResult& result, const Representation& rep, const DiscretizedState& psi) {
  if (!result.dm_norm) throw InvalidArgument("reproduce: Duflo-Moore norm unset");
  const double dm2 = *result.dm_norm * *result.dm_norm;
  std::vector<cplx> w(result.coefficients.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = result.coefficients[i] * result.grid.weights[i] / dm2;
  const auto folded = rep.superpose(psi, w, result.grid.nodes);
  TransformResult out = result;
  out.coefficients = rep.coefficients(psi, folded, result.grid.nodes);
  return out;
}

/// phi~ = ||D psi||^-2 sum_g c(g) U(g) psi w(g).
inline DiscretizedState synthesize(const TransformResult& result, const Representation& rep,
                                   const DiscretizedState& psi) {
  if (!result.dm_norm) throw InvalidArgument("synthesize: Duflo-Moore norm unset");
  if (result.coefficients.size() != result.grid.size()) throw InvalidArgument("synthesize: coefficient/grid mismatch");
  const double dm2 = *result.dm_norm * *result.dm_norm;
  std::vector<cplx> w(result.coefficients.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = result.coefficients[i] * result.grid.weights[i] / dm2;
  return rep.superpose(psi, w, result.grid.nodes);
}

/// Energy ratio sum |c|^2 w / (||D psi||^2 ||phi||^2).
inline double energy_ratio(const TransformResult& result, const DiscretizedState& phi) {
  if (!result.dm_norm) throw InvalidArgument("energy_ratio: Duflo-Moore norm unset");
  return result.energy() / (*result.dm_norm * *result.dm_norm * phi.norm_sq());
}

// --- semi-invariance and the modulo-K identity ------------------------------------------------

/// max over tests of ||U(g) D U(g)^-1 v - Delta(g)^{1/2} D v|| / ||D v||.
inline double semi_invariance_check(const Representation& rep, const DMOperator& D, const Point& g,
                                    const std::vector<DiscretizedState>& tests) {
  const auto& G = *rep.group();
  const double root = std::sqrt(G.modular(g));
  double worst = 0.0;
  for (const auto& v : tests) {
    const DiscretizedState Dv = D.apply(v);
    const DiscretizedState lhs = rep.apply(g, D.apply(rep.apply_inverse(g, v)));
    worst = std::max(worst, distance(lhs, cplx(root) * Dv) / Dv.norm());
  }
  return worst;
}

struct EquivalenceResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relerr = 0.0;
};

/// int_G |c^U|^2 rho dmu_G against int_X |c^{P_s}|^2 dmu_X.
inline EquivalenceResult mod_K_equiv_check(const Representation& U, const RhoDensity& rho, const Section& s,
                                           const DiscretizedState& psi, const DiscretizedState& phi,
                                           const QuadratureGrid& grid_G, const QuadratureGrid& grid_X) {
  EquivalenceResult r;
  const auto cg = U.coefficients(psi, phi, grid_G.nodes);
  std::vector<double> tg(cg.size());
  for (std::size_t i = 0; i < tg.size(); ++i) tg[i] = std::norm(cg[i]) * rho(grid_G.nodes[i]) * grid_G.weights[i];
  r.lhs = pairwise_sum(tg);
  std::vector<Point> lifted(grid_X.size());
  for (std::size_t i = 0; i < lifted.size(); ++i) lifted[i] = s(grid_X.nodes[i]);
  const auto cx = U.coefficients(psi, phi, lifted);
  std::vector<double> tx(cx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) tx[i] = std::norm(cx[i]) * grid_X.weights[i];
  r.rhs = pairwise_sum(tx);
  r.relerr = relative_error(r.lhs, r.rhs);
  return r;
}

/// The coefficient map phi -> c_{psi,phi} as a function on an X grid.
inline GridFunction coefficient_function(const Representation& rep, const DiscretizedState& psi,
                                         const DiscretizedState& phi, std::shared_ptr<const QuadratureGrid> grid) {
  auto c = rep.coefficients(psi, phi, grid->nodes);
  return make_grid_function(std::move(grid), std::move(c));
}

}  // namespace sqint

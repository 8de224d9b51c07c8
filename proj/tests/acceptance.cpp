// Acceptance criteria 1-13: one PASS/FAIL line per criterion; exit status is the number of failures.

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sqint/verify.hpp"

using namespace sqint;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Box unit_box3 = Box(3, {-3.0, 3.0});
const Box unit_box2 = Box(2, {-3.0, 3.0});

// Gabor setting shared by criteria 3, 4, 8 and 12: kcheck = -1, so D = Id under dp dq / 2 pi.
struct Gabor {
  double kc = -1.0;
  Subgroup K = make_wh_center(1, kc);
  Section s = wh_section_s(K);
  std::shared_ptr<const WhRep> U = wh_rep(1, kc);
  std::shared_ptr<const ProjectiveRep> P = projective_from_section(U, s);
  StateGrid sg = periodic_grid({{-16, 16}}, {256});
};

Outcome ac1_algebra() {
  const auto t0 = std::chrono::steady_clock::now();
  constexpr std::size_t N = 1000;
  Rng rng(101);
  double worst = 0.0;
  std::string worst_name;
  const auto track = [&](const std::string& name, double d) {
    if (!(d <= worst)) {
      worst = d;
      worst_name = name;
    }
  };
  const auto axioms = [&](const Group& G, const Box& box) {
    const auto d = check_axioms(*G, box, N, rng);
    return d.max();
  };
  track("wh polarized", axioms(make_polarized_wh(1), unit_box3));
  track("wh standard", axioms(make_standard_wh(1), unit_box3));
  track("affine", axioms(make_affine(1), {{-3, 3}, {0.25, 4.0}}));
  track("exotic", axioms(make_exotic(1), {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}}));
  track("exotic quotient", axioms(make_exotic_quotient(1), {{-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}}));
  track("delta isomorphism", delta_iso_defect(1, unit_box3, N, rng));

  const auto K = make_wh_center(1, -1.0);
  const auto E = make_exotic_tsr(1, {0.0});
  const Box ex_g{{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}};
  const Box ex_x{{-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}};
  const Box ex_ext{{0.0, two_pi}, {-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}};
  const Box wh_ext{{0.0, two_pi}, {-3, 3}, {-3, 3}};
  struct Case {
    Section s;
    Box g_box, x_box, ext_box;
  };
  for (const auto& c : {Case{wh_section_s(K), unit_box3, unit_box2, wh_ext}, Case{wh_section_s_prime(K), unit_box3, unit_box2, wh_ext},
                        Case{exotic_section(E), ex_g, ex_x, ex_ext}, Case{exotic_section_shifted(E), ex_g, ex_x, ex_ext}}) {
    const auto m = multiplier_from_section(c.s);
    const std::string tag = c.s.sub->name + "/" + c.s.name;
    track("multiplier " + tag, check_cocycle(m, c.x_box, N, rng));
    track("extension " + tag, axioms(central_extension(c.s.sub->quotient, m), c.ext_box));
    track("kappa " + tag, kappa_defect(c.s, c.x_box, N, rng));
    track("c_s " + tag, section_cocycle_defect(c.s, c.g_box, c.x_box, N, rng));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 10.0,
          "max defect " + fmt(worst) + " (" + worst_name + ") over " + std::to_string(N) + " samples per check; " + fmt(t) +
              " s"};
}

Outcome ac2_decomposition() {
  const auto K = make_wh_center(1, 1.0);
  const auto f = [](const Point& g) { return std::exp(-(g[0] * g[0] + g[1] * g[1] + g[2] * g[2])); };
  const auto grid_G = haar_grid(*K->ambient, Box(3, {-8, 8}), {32, 32, 32});
  const auto grid_X = haar_grid(*K->quotient, Box(2, {-8, 8}), {32, 32});
  const auto grid_K = haar_grid(*K->subgroup, Box(1, {-8, 8}), {32});
  const auto a = decompose_check(f, wh_section_s(K), grid_G, grid_X, grid_K);
  const auto b = decompose_check(f, wh_section_s_prime(K), grid_G, grid_X, grid_K);
  // Closed form: int exp(-|g|^2) dg / 2 pi.
  const double exact = std::pow(pi, 1.5) / two_pi;
  const double err = std::max({a.relerr, b.relerr, relative_error(a.lhs, exact)});
  const double swap = relative_error(a.rhs, b.rhs);
  return {err <= 1e-6 && swap <= 1e-10, "relerr " + fmt(err) + " at 32^3; section swap " + fmt(swap)};
}

Outcome ac3_gabor_orthogonality() {
  const auto t0 = std::chrono::steady_clock::now();
  const Gabor G;
  const auto& sg = G.sg;
  const auto D = duflo_moore_gabor(G.kc);
  const auto grid = detail::phase_space(8.0, 8.0, 64);
  struct Quad {
    DiscretizedState psi1, psi2, phi1, phi2;
  };
  const std::vector<Quad> quads{
      {gaussian(sg), gaussian(sg), gaussian(sg, {0.5}, {-0.3}), normalized(hermite(sg, {1}, {0.2}))},
      {gaussian(sg), gaussian(sg, {0.4}, {-0.3}), gaussian(sg, {0.5}, {-0.3}), gaussian(sg, {-0.2}, {0.3})},
      {normalized(hermite(sg, {1})), normalized(hermite(sg, {2}, {0.3})), gaussian(sg, {-1.0}), normalized(hermite(sg, {1}, {-0.5}))},
      {normalized(hermite(sg, {2})), gaussian(sg, {0.2}, {0.4}), normalized(hermite(sg, {0}, {0.4})), gaussian(sg, {0.3}, {0.2})},
  };
  double worst = 0.0;
  for (const auto& q : quads) worst = std::max(worst, orthogonality_check(*G.P, q.psi1, q.psi2, q.phi1, q.phi2, D, grid).relerr);
  const double t = seconds_since(t0);
  return {worst <= 1e-3 && t < 30.0, "max relerr " + fmt(worst) + " over 4 pairs, box 8, N = 256; " + fmt(t) + " s"};
}

DiscretizedState gabor_signal(const StateGrid& sg, Rng& rng) {
  DiscretizedState sig(sg);
  for (int i = 0; i < 5; ++i) {
    const cplx w{rng.normal(), rng.normal()};
    sig += w * gaussian(sg, {rng.uniform(-3, 3)}, {rng.uniform(-3, 3)});
  }
  return sig;
}

Outcome ac4_gabor_round_trip() {
  const Gabor G;
  Rng rng(104);
  const auto sig = gabor_signal(G.sg, rng);
  const auto psi = gaussian(G.sg);
  const auto r = analyze(*G.P, psi, sig, detail::phase_space(10.0, 10.0, 80), "gaussian", 1.0);
  const double energy = std::abs(energy_ratio(r, sig) - 1.0);
  const double trip = distance(synthesize(r, *G.P, psi), sig) / sig.norm();
  return {energy <= 1e-3 && trip <= 1e-2, "|energy ratio - 1| " + fmt(energy) + "; round-trip relerr " + fmt(trip)};
}

QuadratureGrid affine_level(const StateGrid& sg, std::size_t l) {
  const double lo = std::ldexp(1.0, -2 - static_cast<int>(l)), hi = std::ldexp(1.0, static_cast<int>(l) - 1);
  return detail::affine_grid(sg, lo, hi, 8 * (l + 2) + 2);
}

Outcome ac5_affine_dichotomy() {
  const auto U = affine_rep(1);
  const auto sg = detail::affine_line();
  const auto levels = [&](std::size_t l) { return affine_level(sg, l); };
  const auto m = admissibility(*U, morlet(sg), levels, 4);
  const auto g = admissibility(*U, gaussian(sg), levels, 4);
  // Oracle: (1/2) int |psi^(w)|^2 / |w| dw from the analytic transform of the Morlet vector.
  const double w0 = 5.0, c = std::exp(-0.5 * w0 * w0);
  const auto hat = [&](double w) {
    return 0.5 * std::exp(-0.5 * (w - w0) * (w - w0)) + 0.5 * std::exp(-0.5 * (w + w0) * (w + w0)) - c * std::exp(-0.5 * w * w);
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double raw = ts.integrate([&](double w) { return hat(w) * hat(w) / w; }, 0.0, 40.0);
  const double norm2 = ts.integrate([&](double w) { return hat(w) * hat(w); }, 0.0, 40.0) / pi;
  const double oracle = raw / norm2;
  const double err = m.dm_norm_sq ? relative_error(*m.dm_norm_sq, oracle) : 1.0;
  const bool pass = m.status == AdmissibilityStatus::admissible && err <= 2e-2 &&
                    g.status == AdmissibilityStatus::divergent && !g.dm_norm_sq;
  return {pass, "Morlet " + to_string(m.status) + ", dm_norm_sq relerr " + fmt(err) + " vs analytic quadrature; Gaussian " +
                    to_string(g.status) + " (final increment " + fmt(g.final_relative_increment) + ")"};
}

Outcome ac6_affine_orthogonality() {
  const auto U = affine_rep(1);
  const auto sg = detail::affine_line();
  const auto grid = detail::affine_grid(sg, 1.0 / 32.0, 4.0, 56);
  const auto cal = calibrate_dm(*U, duflo_moore_affine(1.0),
                                {{morlet(sg), wave_packet(sg, 0.5, 4.0)}, {mexican_hat(sg), wave_packet(sg, -1.0, 5.0)}}, grid);
  // Held-out pair: a different analyzing vector and signals outside the calibration set.
  const auto psi = morlet(sg, 6.0);
  const auto r = orthogonality_check(*U, psi, psi, wave_packet(sg, 1.5, 6.0, 0.8), wave_packet(sg, 1.0, 5.5),
                                     duflo_moore_affine(cal.C), grid);
  return {r.relerr <= 1e-2, "held-out relerr " + fmt(r.relerr) + " with calibrated C^2 = " + fmt(cal.C_sq)};
}

Outcome ac7_semi_invariance() {
  const auto U = affine_rep(1);
  const auto sg = detail::affine_line();
  const auto D = duflo_moore_affine(std::sqrt(pi));
  const std::vector<DiscretizedState> tests{morlet(sg, 6.0), morlet(sg, 5.0, 1.2)};
  double worst = 0.0;
  for (double a : {0.5, 2.0}) {
    for (double b : {-0.6, 0.7}) worst = std::max(worst, semi_invariance_check(*U, D, {b, a}, tests));
  }
  return {worst <= 1e-6, "max relerr " + fmt(worst) + " for a in {1/2, 2}"};
}

Outcome ac8_reproducing_kernel() {
  const Gabor G;
  Rng rng(108);
  const auto sig = gabor_signal(G.sg, rng);
  const auto psi = gaussian(G.sg);
  const auto r = analyze(*G.P, psi, sig, detail::phase_space(10.0, 10.0, 80), "gaussian", 1.0);
  double peak = 0.0;
  for (const auto& c : r.coefficients) peak = std::max(peak, std::abs(c));
  std::vector<std::size_t> sampled;
  while (sampled.size() < 16) {
    const std::size_t i = rng.engine()() % r.grid.size();
    if (std::abs(r.coefficients[i]) > 1e-2 * peak) sampled.push_back(i);
  }
  const auto rep = reproduce_check(r, *G.P, psi, sampled);
  double herm = 0.0;
  for (int i = 0; i < 16; ++i) {
    const Point x = rng.uniform_point({{-4, 4}, {-4, 4}}), y = rng.uniform_point({{-4, 4}, {-4, 4}});
    herm = std::max(herm, std::abs(kernel(*G.P, psi, x, y, 1.0) - std::conj(kernel(*G.P, psi, y, x, 1.0))));
  }
  return {rep.max_relerr <= 1e-2 && herm <= 1e-12,
          "reproduction relerr " + fmt(rep.max_relerr) + " at 16 nodes; Hermitian defect " + fmt(herm)};
}

Outcome ac9_mod_k_equivalence() {
  const double kc = -1.0;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s(K);
  const auto U = wh_rep(1, kc);
  const auto sg = periodic_grid({{-16, 16}}, {256});
  const auto psi = gaussian(sg), phi = gaussian(sg, {0.5}, {0.5});
  const auto grid_X = haar_grid(*K->quotient, Box(2, {-8, 8}), {24, 24});
  const auto grid_G = haar_grid(*K->ambient, {{-4, 4}, {-8, 8}, {-8, 8}}, {512, 24, 24});
  const auto a = mod_K_equiv_check(*U, make_rho("gaussian", s, 0.4), s, psi, phi, grid_G, grid_X);
  const auto b = mod_K_equiv_check(*U, make_rho("bump", s, 2.0), s, psi, phi, grid_G, grid_X);
  const double err = std::max(a.relerr, b.relerr), rho = relative_error(a.lhs, b.lhs);
  return {err <= 1e-10 && rho <= 1e-10, "G vs X relerr " + fmt(err) + "; gaussian vs bump density " + fmt(rho)};
}

Outcome ac10_divergence() {
  const auto U = wh_rep(1, 1.0);
  const auto sg = periodic_grid({{-16, 16}}, {256});
  const auto probe = center_divergence_probe(*U, gaussian(sg), gaussian(sg, {0.5}, {0.5}), {2.0, 4.0, 8.0, 16.0},
                                             Box(2, {-8, 8}), {48, 48});
  double ratio_dev = 0.0;
  for (std::size_t i = 1; i < probe.partial.size(); ++i) {
    ratio_dev = std::max(ratio_dev, std::abs(probe.partial[i] / probe.partial[i - 1] - 2.0) / 2.0);
  }
  return {probe.slope_relerr <= 5e-2 && ratio_dev <= 5e-2,
          "slope vs X-integral relerr " + fmt(probe.slope_relerr) + "; doubling-ratio deviation " + fmt(ratio_dev)};
}

Outcome ac11_exotic() {
  const auto E = make_exotic_tsr(1, {0.0});
  const auto P = projective_from_section(exotic_rep(1), exotic_section(E));
  const auto sg = detail::exotic_plane(64, 8.0, 64, 16.0);
  const auto grid = detail::exotic_quotient_grid(sg, 16, 16);
  const auto D = duflo_moore_exotic();
  const auto o = orthogonality_check(*P, detail::exotic_state(sg, 0.0, 0.0), detail::exotic_state(sg, 0.3, 0.5, 1.5),
                                     detail::exotic_state(sg, 0.5, -0.4), detail::exotic_state(sg, 0.0, 0.2, 1.5), D, grid);

  const auto X = make_exotic_quotient(1);
  const auto f = [](const Point& x) {
    const double u = std::log(x[3]);
    return std::exp(-x[2] * x[2] - u * u);
  };
  const auto hgrid = haar_grid(*X, {{-1, 1}, {-1, 1}, {-16, 16}, {std::exp(-9.0), std::exp(9.0)}}, {2, 2, 256, 128},
                               {AxisSpacing::linear, AxisSpacing::linear, AxisSpacing::linear, AxisSpacing::log});
  double modular = 0.0;
  for (const Point& g : {Point{0.0, 0.0, 0.5, 2.0}, Point{0.3, -0.2, -0.3, 0.5}, Point{0.0, 0.0, 0.0, 3.0}}) {
    modular = std::max(modular, std::abs(modular_from_right_translation(*X, f, g, hgrid) - 1.0 / g[3]) * g[3]);
  }

  const auto growth = symbol_growth(D, 0.125, 12);
  bool monotone = true;
  for (std::size_t i = 1; i < growth.values.size(); ++i) monotone = monotone && growth.values[i] > growth.values[i - 1];
  // sqrt(2) up to the rounding of one division.
  const bool unbounded = monotone && growth.min_ratio >= std::sqrt(2.0) * (1.0 - 1e-12);
  return {o.relerr <= 5e-2 && modular <= 1e-6 && unbounded,
          "orthogonality relerr " + fmt(o.relerr) + " at 64 x 64 state grid; Delta_X relerr " + fmt(modular) +
              "; symbol min ratio " + fmt(growth.min_ratio) + " over " + std::to_string(growth.values.size()) + " halvings"};
}

Outcome ac12_intertwining() {
  const Gabor G;
  Rng rng(112);
  const auto& sg = G.sg;
  const auto psi = gaussian(sg);
  const std::vector<DiscretizedState> tests{gaussian(sg, {0.5}, {-0.3}), normalized(hermite(sg, {1}, {0.2}))};
  const auto xg = std::make_shared<const QuadratureGrid>(detail::phase_space(8.0, 8.0, 48));
  const auto C = [&](const DiscretizedState& v) { return coefficient_function(*G.P, psi, v, xg); };
  const auto P_left = [&](const Point& g, const DiscretizedState& v) { return G.P->apply(g, v); };
  const auto m_right = [&](const Point& g, const GridFunction& F) { return left_reg_m(G.P->multiplier(), g, F); };
  const auto U_left = [&](const Point& g, const DiscretizedState& v) { return G.U->apply(g, v); };
  const auto R_right = [&](const Point& g, const GridFunction& F) { return R_chi_s(G.s, g, F); };
  double reg = 0.0, ind = 0.0;
  for (int i = 0; i < 20; ++i) {
    reg = std::max(reg, intertwine_defect(C, P_left, m_right, rng.uniform_point({{-2, 2}, {-2, 2}}), tests));
    ind = std::max(ind, intertwine_defect(C, U_left, R_right, rng.uniform_point({{-3, 3}, {-2, 2}, {-2, 2}}), tests));
  }
  return {reg <= 1e-6 && ind <= 1e-6,
          "left m-regular defect " + fmt(reg) + "; induced R^{chi,s} defect " + fmt(ind) + " over 20 elements each"};
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, p)) > 0;) out.append(buf, n);
  status = ::pclose(p);
  return out;
}

Outcome ac13_determinism() {
  std::string detail;
  bool pass = true;
  for (const char* group : {"wh", "affine", "exotic"}) {
    const std::string cmd = std::string("\"") + SQINT_CLI_PATH + "\" verify --group " + group;
    int s1 = 0, s2 = 0;
    const auto a = capture(cmd, s1), b = capture(cmd, s2);
    const bool same = s1 == 0 && s2 == 0 && !a.empty() && a == b;
    pass = pass && same;
    detail += std::string(detail.empty() ? "" : "; ") + group + (same ? " identical" : " differs") + " (" +
              std::to_string(a.size()) + " bytes)";
  }
  return {pass, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 algebraic suite", ac1_algebra},
      {"AC2 measure decomposition", ac2_decomposition},
      {"AC3 Gabor orthogonality", ac3_gabor_orthogonality},
      {"AC4 Gabor isometry and round trip", ac4_gabor_round_trip},
      {"AC5 affine admissibility dichotomy", ac5_affine_dichotomy},
      {"AC6 affine orthogonality", ac6_affine_orthogonality},
      {"AC7 semi-invariance", ac7_semi_invariance},
      {"AC8 reproducing kernel", ac8_reproducing_kernel},
      {"AC9 modulo-K equivalence", ac9_mod_k_equivalence},
      {"AC10 non-square-integrability on the full group", ac10_divergence},
      {"AC11 exotic group", ac11_exotic},
      {"AC12 intertwining", ac12_intertwining},
      {"AC13 determinism", ac13_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

#include <gtest/gtest.h>

#include <cmath>

#include "sqint/induced.hpp"
#include "sqint/transforms.hpp"

using namespace sqint;

namespace {

std::shared_ptr<const QuadratureGrid> phase_space_grid(double r = 10.0, std::size_t res = 80) {
  return std::make_shared<const QuadratureGrid>(haar_grid(*make_wh_phase_space(1), Box(2, {-r, r}), {res, res}));
}

// A smooth band-limited function on phase space with a mild chirp.
GridFunction smooth_function(std::shared_ptr<const QuadratureGrid> grid, double p0 = 0.3, double q0 = -0.4) {
  std::vector<cplx> v(grid->size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double p = grid->nodes[i][0], q = grid->nodes[i][1];
    v[i] = std::exp(-0.5 * ((p - p0) * (p - p0) + (q - q0) * (q - q0))) * unit(0.5 * p - 0.25 * q);
  }
  return make_grid_function(std::move(grid), std::move(v));
}

}  // namespace

TEST(GridFunction, InterpolationReproducesNodesAndSmoothValues) {
  const auto grid = phase_space_grid();
  const auto f = smooth_function(grid);
  for (std::size_t i : {0u, 123u, 4000u}) EXPECT_EQ(interpolate(f, grid->nodes[i]), f.values[i]);
  const Point y{0.37, -0.81};
  const cplx exact =
      std::exp(-0.5 * ((y[0] - 0.3) * (y[0] - 0.3) + (y[1] + 0.4) * (y[1] + 0.4))) * unit(0.5 * y[0] - 0.25 * y[1]);
  EXPECT_LE(std::abs(interpolate(f, y) - exact), 1e-10);
  bool outside = false;
  EXPECT_EQ(interpolate(f, {11.0, 0.0}, &outside), cplx{});
  EXPECT_TRUE(outside);
  EXPECT_THROW(make_grid_function(grid, std::vector<cplx>(3)), InvalidArgument);
}

TEST(CovariantFunction, IsometryAndCovariance) {
  const double kc = 1.5;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s(K), sp = wh_section_s_prime(K);
  const auto grid = phase_space_grid(6.0, 24);
  Rng rng(51);
  std::vector<cplx> v(grid->size());
  for (auto& c : v) c = {rng.normal(), rng.normal()};
  const auto phi = make_grid_function(grid, v);
  const auto F = F_s(s, phi);
  EXPECT_NEAR(F.norm(), grid_norm(phi), 1e-12 * grid_norm(phi));
  const auto& G = *K->ambient;
  for (int i = 0; i < 100; ++i) {
    const Point& x = grid->nodes[rng.engine()() % grid->size()];
    const Point k{rng.uniform(-5, 5)};
    // f(s(x) k) = chi(k)^-1 f(s(x))
    EXPECT_LE(std::abs(F.at(G.product(s(x), K->embed(k))) - unit(-kc * k[0]) * F.at(s(x))), 1e-12);
    // f(s'(x)) = chi(upsilon(x))^-1 f(s(x))
    const double beta = K->character(section_transition(s, sp, x));
    EXPECT_LE(std::abs(F.at(sp(x)) - unit(-beta) * F.at(s(x))), 1e-12);
  }
  const auto zero = F_s(s, make_grid_function(grid, std::vector<cplx>(grid->size())));
  EXPECT_EQ(zero.norm(), 0.0);
}

TEST(InducedRep, CentralElementsActByTheCharacter) {
  const double kc = -1.0;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s(K);
  const auto f = smooth_function(phase_space_grid());
  for (double k : {0.3, -2.0, 7.5}) {
    const auto Rf = R_chi_s(s, K->embed({k}), f);
    std::vector<cplx> expected = f.values;
    for (auto& c : expected) c *= unit(kc * k);
    EXPECT_LE(max_abs_diff(Rf.values, expected), 1e-10);
    EXPECT_EQ(Rf.out_of_box, 0u);
  }
  const auto Re = R_chi_s(s, K->ambient->identity, f);
  EXPECT_EQ(Re.values, f.values);
}

TEST(InducedRep, UnitaryAndHomomorphism) {
  Rng rng(52);
  const auto K = make_wh_center(1, -1.0);
  const auto& G = *K->ambient;
  const auto f = smooth_function(phase_space_grid());
  for (const auto& s : {wh_section_s(K), wh_section_s_prime(K)}) {
    for (int i = 0; i < 5; ++i) {
      const Point g = rng.uniform_point({{-2, 2}, {-1.5, 1.5}, {-1.5, 1.5}});
      const Point h = rng.uniform_point({{-2, 2}, {-1.5, 1.5}, {-1.5, 1.5}});
      const auto Rgf = R_chi_s(s, g, f);
      EXPECT_NEAR(grid_norm(Rgf), grid_norm(f), 1e-8);
      EXPECT_LE(grid_norm(R_chi_s(s, g, R_chi_s(s, h, f)) - R_chi_s(s, G.product(g, h), f)), 1e-8);
    }
  }
}

TEST(LeftRegularM, ProjectiveWithMultiplier) {
  Rng rng(53);
  const auto K = make_wh_center(1, -1.0);
  const auto m = multiplier_from_section(wh_section_s(K));
  const auto& X = *m.base;
  const auto f = smooth_function(phase_space_grid());
  EXPECT_EQ(left_reg_m(m, X.identity, f).values, f.values);
  for (int i = 0; i < 5; ++i) {
    const Point g = rng.uniform_point({{-1.5, 1.5}, {-1.5, 1.5}});
    const Point h = rng.uniform_point({{-1.5, 1.5}, {-1.5, 1.5}});
    // R_g R_h = m(g, h)^-1 R_gh
    auto rhs = left_reg_m(m, X.product(g, h), f);
    for (auto& c : rhs.values) c *= unit(-m.phase(g, h));
    EXPECT_LE(grid_norm(left_reg_m(m, g, left_reg_m(m, h, f)) - rhs), 1e-8);
    EXPECT_NEAR(grid_norm(left_reg_m(m, g, f)), grid_norm(f), 1e-8);
  }
  // Trivial multiplier: plain left translation.
  const auto t = left_reg_m(trivial_multiplier(m.base), {1.0, 0.0}, f);
  const auto shifted = smooth_function(f.grid, 1.3, -0.4);
  std::vector<cplx> expected = shifted.values;
  for (std::size_t i = 0; i < expected.size(); ++i) expected[i] *= unit(-0.5);
  EXPECT_LE(max_abs_diff(t.values, expected), 1e-10);
}

TEST(Intertwining, GaborCoefficientMapWithLeftRegularM) {
  Rng rng(54);
  const double kc = -1.0;
  const auto K = make_wh_center(1, kc);
  const auto P = projective_from_section(wh_rep(1, kc), wh_section_s(K));
  const auto state_grid = periodic_grid({{-16, 16}}, {256});
  const auto psi = gaussian(state_grid);
  const std::vector<DiscretizedState> tests{gaussian(state_grid, {0.5}, {-0.3}), hermite(state_grid, {1}, {0.2}),
                                            gaussian(state_grid, {-1.0}, {1.0}, 1.3)};
  const auto xgrid = phase_space_grid();
  const auto C = [&](const DiscretizedState& v) { return coefficient_function(*P, psi, v, xgrid); };
  const auto left = [&](const Point& g, const DiscretizedState& v) { return P->apply(g, v); };
  const auto right = [&](const Point& g, const GridFunction& f) { return left_reg_m(P->multiplier(), g, f); };
  for (int i = 0; i < 5; ++i) {
    const Point g = rng.uniform_point({{-2, 2}, {-2, 2}});
    EXPECT_LE(intertwine_defect(C, left, right, g, tests), 1e-6);
  }
  // Fault injection: the conjugate multiplier breaks the relation.
  const auto wrong = [&](const Point& g, const GridFunction& f) { return left_reg_m(conjugate(P->multiplier()), g, f); };
  EXPECT_GT(intertwine_defect(C, left, wrong, {1.0, 1.5}, tests), 0.1);
  // Identity operator with equal actions is trivially intertwining.
  const auto id = [](const DiscretizedState& v) { return v; };
  EXPECT_EQ(intertwine_defect(id, left, left, {1.0, 1.0}, tests), 0.0);
}

TEST(Intertwining, ModKCoefficientMapWithInducedRep) {
  Rng rng(55);
  const double kc = 1.0;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s_prime(K);
  const auto U = wh_rep(1, kc);
  const auto P = projective_from_section(U, s);
  const auto state_grid = periodic_grid({{-16, 16}}, {256});
  const auto psi = gaussian(state_grid, {0.0}, {0.5});
  const std::vector<DiscretizedState> tests{gaussian(state_grid, {0.5}, {-0.3}), hermite(state_grid, {2})};
  const auto xgrid = phase_space_grid();
  const auto C = [&](const DiscretizedState& v) { return coefficient_function(*P, psi, v, xgrid); };
  const auto left = [&](const Point& g, const DiscretizedState& v) { return U->apply(g, v); };
  const auto right = [&](const Point& g, const GridFunction& f) { return R_chi_s(s, g, f); };
  for (int i = 0; i < 5; ++i) {
    const Point g = rng.uniform_point({{-3, 3}, {-2, 2}, {-2, 2}});
    EXPECT_LE(intertwine_defect(C, left, right, g, tests), 1e-6);
  }
}

TEST(Intertwining, ExoticNodeAlignedTranslations) {
  // On the exotic quotient, node-aligned (p, q, b) shifts at a = 1 keep g^-1[x] on the grid.
  const auto E = make_exotic_tsr(1, {0.0});
  const auto s = exotic_section(E);
  const auto U = exotic_rep(1);
  const auto P = projective_from_section(U, s);
  const StateGrid sg{{1.0 / 16.0, -8.0}, {1.0 / 8.0, 0.25}, {64, 64}};
  const auto profile = [](const Point& x, double mom) {
    const double b = x[0];
    return std::pow(b, 5) * std::exp(-2.0 * b * b) * std::exp(-0.5 * x[1] * x[1]) * unit(mom * x[1]);
  };
  const auto psi = normalized(sample(sg, [&](const Point& x) { return profile(x, 0.0); }));
  const std::vector<DiscretizedState> tests{normalized(sample(sg, [&](const Point& x) { return profile(x, 0.5); }))};
  const auto xgrid = std::make_shared<const QuadratureGrid>(
      haar_grid(*E->quotient, {{-4, 4}, {-4, 4}, {-6, 6}, {0.5, 2.0}}, {16, 16, 24, 4},
                {AxisSpacing::linear, AxisSpacing::linear, AxisSpacing::linear, AxisSpacing::log}));
  const auto C = [&](const DiscretizedState& v) { return coefficient_function(*P, psi, v, xgrid); };
  const auto left = [&](const Point& g, const DiscretizedState& v) { return U->apply(g, v); };
  const auto right = [&](const Point& g, const GridFunction& f) { return R_chi_s(s, g, f); };
  const Point g{0.3, 0.2, 0.5, 0.5, -1.0, 0.4, 1.0};
  const auto Cv = C(tests[0]);
  const auto lhs = C(left(g, tests[0]));
  const auto rhs = right(g, Cv);
  // Restrict to nodes whose preimage stays inside the box.
  double num = 0.0, den = 0.0;
  const auto& G = *E->ambient;
  const Point gi = G.inverse(g);
  for (std::size_t i = 0; i < xgrid->size(); ++i) {
    bool out = false;
    interpolate(Cv, E->act(gi, xgrid->nodes[i]), &out);
    if (out) continue;
    num += std::norm(lhs.values[i] - rhs.values[i]) * xgrid->weights[i];
    den += std::norm(lhs.values[i]) * xgrid->weights[i];
  }
  ASSERT_GT(den, 0.0);
  EXPECT_LE(std::sqrt(num / den), 1e-6);
}

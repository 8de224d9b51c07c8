#include <gtest/gtest.h>

#include <cmath>

#include "sqint/measures.hpp"

using namespace sqint;

namespace {

Box cube(std::size_t d, double r) { return Box(d, {-r, r}); }

double gauss3(const Point& g) { return std::exp(-g[0] * g[0] - g[1] * g[1] - g[2] * g[2]); }

}  // namespace

TEST(GammaS, RoundTrip) {
  Rng rng(41);
  const auto K = make_wh_center(1, 1.0);
  for (const auto& s : {wh_section_s(K), wh_section_s_prime(K)}) {
    for (int i = 0; i < 200; ++i) {
      const Point x = rng.uniform_point(cube(2, 3.0));
      const Point k{rng.uniform(-3, 3)};
      const auto [y, kk] = gamma_s_inv(s, gamma_s(s, x, k));
      EXPECT_LE(max_abs_diff(y, x), 1e-12);
      EXPECT_LE(max_abs_diff(kk, k), 1e-12);
    }
  }
  const auto E = make_exotic_tsr(1, {0.0});
  const auto es = exotic_section(E);
  for (int i = 0; i < 200; ++i) {
    const Point x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 2.0)};
    const Point k = rng.uniform_point(cube(3, 2.0));
    const auto [y, kk] = gamma_s_inv(es, gamma_s(es, x, k));
    EXPECT_LE(max_abs_diff(y, x), 1e-12);
    EXPECT_LE(max_abs_diff(kk, k), 1e-12);
  }
}

TEST(GammaS, CoordinateProductMatchesGroupProduct) {
  Rng rng(42);
  const auto check = [&](const Section& s, const Box& xbox, const Box& kbox) {
    const auto& G = *s.sub->ambient;
    double worst = 0.0;
    for (int i = 0; i < 300; ++i) {
      const Point x = rng.uniform_point(xbox), xp = rng.uniform_point(xbox);
      const Point k = rng.uniform_point(kbox), kp = rng.uniform_point(kbox);
      const auto [z, kz] = coord_product(s, x, k, xp, kp);
      const auto [zz, kk] = gamma_s_inv(s, G.product(gamma_s(s, x, k), gamma_s(s, xp, kp)));
      worst = std::max({worst, max_abs_diff(z, zz), max_abs_diff(kz, kk)});
    }
    return worst;
  };
  const auto K = make_wh_center(1, -1.0);
  EXPECT_LE(check(wh_section_s(K), cube(2, 2.0), cube(1, 2.0)), 1e-12);
  EXPECT_LE(check(wh_section_s_prime(K), cube(2, 2.0), cube(1, 2.0)), 1e-12);
  const auto E = make_exotic_tsr(1, {0.0});
  EXPECT_LE(check(exotic_section(E), {{-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}}, cube(3, 2.0)), 1e-12);
}

TEST(Decomposition, WeylHeisenbergGaussianAndSectionSwap) {
  const auto K = make_wh_center(1, 1.0);
  const auto& G = *K->ambient;
  const auto grid_G = haar_grid(G, cube(3, 8.0), {32, 32, 32});
  const auto grid_X = haar_grid(*K->quotient, cube(2, 8.0), {32, 32});
  const auto grid_K = haar_grid(*K->subgroup, cube(1, 8.0), {32});
  const double exact = std::pow(pi, 1.5) / two_pi;
  const auto a = decompose_check(gauss3, wh_section_s(K), grid_G, grid_X, grid_K);
  const auto b = decompose_check(gauss3, wh_section_s_prime(K), grid_G, grid_X, grid_K);
  EXPECT_LE(a.relerr, 1e-6);
  EXPECT_LE(b.relerr, 1e-6);
  EXPECT_LE(relative_error(a.lhs, exact), 1e-6);
  EXPECT_LE(relative_error(a.rhs, b.rhs), 1e-10);
}

TEST(Rho, ProfilesAreNormalizedAndKindsParsed) {
  for (auto kind : {RhoKind::gaussian, RhoKind::bump}) {
    for (double w : {0.5, 1.0, 3.0}) {
      const Profile p(kind, w);
      const auto grid = haar_grid(*make_vector_group("R", {"k"}), cube(1, p.support()), {4096});
      EXPECT_NEAR(grid.integrate([&](const Point& k) { return p(k[0]); }), 1.0, 1e-12) << to_string(kind) << w;
    }
  }
  EXPECT_EQ(parse_rho_kind("gaussian"), RhoKind::gaussian);
  EXPECT_EQ(parse_rho_kind("bump"), RhoKind::bump);
  EXPECT_THROW(parse_rho_kind("constant"), InvalidArgument);
  EXPECT_THROW(Profile(RhoKind::bump, 0.0), InvalidArgument);
  EXPECT_EQ(Profile(RhoKind::bump, 2.0)(2.5), 0.0);
}

TEST(Rho, CosetIntegralsAreOneForEverySection) {
  Rng rng(43);
  const auto K = make_wh_center(1, 1.0);
  const auto s = wh_section_s(K), sp = wh_section_s_prime(K);
  std::vector<Point> xs(50);
  for (auto& x : xs) x = rng.uniform_point(cube(2, 3.0));
  // Bump densities need a few hundred nodes across their support for 1e-12 accuracy.
  const auto grid_K = haar_grid(*K->subgroup, cube(1, 16.0), {8192});
  for (const auto kind : {"gaussian", "bump"}) {
    const auto rho = make_rho(kind, s, 1.0);
    EXPECT_LE(rho_validate(rho, s, xs, grid_K), 1e-12) << kind;
    EXPECT_LE(rho_validate(rho, sp, xs, grid_K), 1e-12) << kind;
    const auto moved = translate_rho(rho, {0.3, -1.0, 2.0});
    EXPECT_LE(rho_validate(moved, s, xs, grid_K), 1e-12) << kind;
  }
  const auto mixed = mix_rho(make_rho("gaussian", s, 0.7), make_rho("bump", sp, 2.0), 0.3);
  EXPECT_LE(rho_validate(mixed, s, xs, grid_K), 1e-12);
  EXPECT_THROW(make_rho("constant", s), InvalidArgument);
}

TEST(Rho, ExoticCosetIntegrals) {
  Rng rng(44);
  const auto E = make_exotic_tsr(1, {0.0});
  const auto s = exotic_section(E), sp = exotic_section_shifted(E);
  std::vector<Point> xs(10);
  for (auto& x : xs) x = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.5, 2.0)};
  const auto grid_K = haar_grid(*E->subgroup, cube(3, 12.0), {96, 96, 96});
  const auto rho = make_rho("gaussian", s, 1.0);
  EXPECT_LE(rho_validate(rho, s, xs, grid_K), 1e-12);
  EXPECT_LE(rho_validate(rho, sp, xs, grid_K), 1e-12);
}

TEST(ModK, LeftInvarianceWithTranslatedDensity) {
  const auto K = make_wh_center(1, 1.0);
  const auto s = wh_section_s(K);
  const auto grid = haar_grid(*K->ambient, {{-10, 10}, {-12, 12}, {-12, 12}}, {2048, 32, 32});
  const auto f = [](const Point& g) { return std::exp(-0.5 * (g[1] * g[1] + g[2] * g[2])) / (1.0 + g[0] * g[0]); };
  EXPECT_LE(mod_K_left_invariance_defect(f, make_rho("gaussian", s, 1.0), {0.4, 0.5, -0.7}, grid), 1e-8);
  // A translation with q != 0 shears the compact bump across the p axis, which this grid cannot
  // resolve to 1e-8; a shear-free translation isolates the invariance itself.
  EXPECT_LE(mod_K_left_invariance_defect(f, make_rho("bump", s, 1.0), {0.4, 0.5, 0.0}, grid), 1e-8);
  // The untranslated density is not invariant: the check would be vacuous otherwise.
  const auto rho = make_rho("gaussian", s, 1.0);
  const auto& G = *K->ambient;
  const Point g{0.0, 0.5, -0.7};
  const double lhs = integrate_mod_K([&](const Point& h) { return f(G.product(g, h)); }, rho, grid);
  const double rhs = integrate_mod_K(f, rho, grid);
  EXPECT_GT(relative_error(lhs, rhs), 1e-3);
}

TEST(ModK, NestedIntegralConvergesAndRecordsTail) {
  const auto K = make_wh_center(1, 1.0);
  const auto rho = make_rho("gaussian", wh_section_s(K), 1.0);
  const auto f = [](const Point& g) { return std::exp(-g[1] * g[1] - g[2] * g[2]); };
  const auto r = integrate_mod_K_nested(f, rho, {{-4, 4}, {-8, 8}, {-8, 8}}, {32, 32, 32}, 2);
  ASSERT_EQ(r.values.size(), 3u);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(relative_error(r.value, pi / two_pi), 1e-10);
  EXPECT_GT(std::abs(r.values[0] - r.value), r.tail);
}

TEST(Divergence, CenterPartialIntegralsGrowLinearly) {
  const auto U = wh_rep(1, 1.0);
  const auto grid = periodic_grid({{-16, 16}}, {256});
  const auto psi = gaussian(grid), phi = gaussian(grid, {0.5}, {0.5});
  const auto probe = center_divergence_probe(*U, psi, phi, {2.0, 4.0, 8.0, 16.0}, cube(2, 8.0), {48, 48});
  for (std::size_t i = 1; i < probe.partial.size(); ++i) {
    EXPECT_NEAR(probe.partial[i] / probe.partial[i - 1], 2.0, 0.05);
  }
  EXPECT_LE(probe.slope_relerr, 0.05);
  EXPECT_THROW(center_divergence_probe(*U, psi, phi, {0.0}, cube(2, 8.0), {8, 8}), InvalidArgument);
}

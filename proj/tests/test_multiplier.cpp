#include <gtest/gtest.h>

#include "sqint/multiplier.hpp"

using namespace sqint;

namespace {

Box cube(std::size_t d, double r) { return Box(d, {-r, r}); }

Box exotic_x_box() { return {{-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}}; }

Box exotic_g_box() { return {{-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {-2, 2}, {0.5, 2.0}}; }

}  // namespace

TEST(Kappa, WeylHeisenbergSectionS) {
  const auto K = make_wh_center(1, 1.0);
  const auto s = wh_section_s(K);
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    const Point x1 = rng.uniform_point(cube(2, 4.0)), x2 = rng.uniform_point(cube(2, 4.0));
    const Point k = kappa_from_section(s, x1, x2);
    ASSERT_EQ(k.size(), 1u);
    EXPECT_NEAR(k[0], -x1[1] * x2[0], 1e-12);
  }
  EXPECT_EQ(kappa_from_section(s, {0, 0}, {1.5, -2})[0], 0.0);
}

TEST(Kappa, SectionSPrimeIsAntisymmetric) {
  const auto K = make_wh_center(1, 1.0);
  const auto s = wh_section_s_prime(K);
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const Point x1 = rng.uniform_point(cube(2, 4.0)), x2 = rng.uniform_point(cube(2, 4.0));
    EXPECT_NEAR(kappa_from_section(s, x1, x2)[0], 0.5 * (x1[0] * x2[1] - x1[1] * x2[0]), 1e-12);
  }
}

TEST(Kappa, ExoticSectionLandsInSubgroup) {
  const auto K = make_exotic_tsr(1, {0.7});
  const auto s = exotic_section(K);
  const auto& G = *K->ambient;
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Point x1 = rng.uniform_point(exotic_x_box()), x2 = rng.uniform_point(exotic_x_box());
    const Point g = G.product(G.inverse(G.product(s(x1), s(x2))), s(K->quotient->product(x1, x2)));
    EXPECT_LE(K->offset_from_subgroup(g), 1e-12);
    EXPECT_NO_THROW(kappa_from_section(s, x1, x2));
  }
}

TEST(Kappa, InconsistentSectionIsDetected) {
  const auto K = make_wh_center(1, 1.0);
  Section bad{"bad", K, [](const Point& x) { return Point{0.0, x[0] * x[0], x[1]}; }};
  EXPECT_THROW(kappa_from_section(bad, {1.0, 1.0}, {1.0, 1.0}), ConsistencyError);
  EXPECT_THROW(section_cocycle(bad, {0.0, 1.0, 0.0}, {1.0, 1.0}), ConsistencyError);
}

TEST(MultiplierFromSection, WeylHeisenbergClosedForm) {
  const double kc = 1.7;
  const auto K = make_wh_center(1, kc);
  const auto m = multiplier_from_section(wh_section_s(K));
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const Point x1 = rng.uniform_point(cube(2, 3.0)), x2 = rng.uniform_point(cube(2, 3.0));
    EXPECT_LE(phase_distance(m.phase(x1, x2), -kc * x1[1] * x2[0]), 1e-12);
  }
  EXPECT_EQ(m.phase({0, 0}, {2, 3}), 0.0);
}

TEST(MultiplierFromSection, ExoticClosedForm) {
  const auto K = make_exotic_tsr(1, {0.0});
  const auto m = multiplier_from_section(exotic_section(K));
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const Point x1 = rng.uniform_point(exotic_x_box()), x2 = rng.uniform_point(exotic_x_box());
    EXPECT_LE(phase_distance(m.phase(x1, x2), -x1[1] * x2[0]), 1e-12);
  }
}

TEST(CheckCocycle, SectionMultipliersAreCocycles) {
  Rng rng(6);
  const auto K = make_wh_center(2, -1.0);
  EXPECT_LE(check_cocycle(multiplier_from_section(wh_section_s(K)), cube(4, 3.0), 1000, rng), 1e-12);
  EXPECT_LE(check_cocycle(multiplier_from_section(wh_section_s_prime(K)), cube(4, 3.0), 1000, rng), 1e-12);
  const auto E = make_exotic_tsr(1, {0.3});
  EXPECT_LE(check_cocycle(multiplier_from_section(exotic_section(E)), exotic_x_box(), 1000, rng), 1e-12);
  EXPECT_LE(check_cocycle(multiplier_from_section(exotic_section_shifted(E)), exotic_x_box(), 1000, rng), 1e-12);
}

TEST(CheckCocycle, TrivialAndCorrupted) {
  Rng rng(7);
  const auto X = make_wh_phase_space(1);
  EXPECT_EQ(check_cocycle(trivial_multiplier(X), cube(2, 3.0), 200, rng), 0.0);

  const auto m = multiplier_from_section(wh_section_s(make_wh_center(1, -1.0)));
  Multiplier bad = m;
  bad.phase = [ph = m.phase](const Point& x, const Point& y) {
    const bool cell = x[0] > 0.0 && x[0] < 1.0 && y[0] > 0.0 && y[0] < 1.0;
    return ph(x, y) + (cell ? 0.1 : 0.0);
  };
  EXPECT_GE(check_cocycle(bad, cube(2, 1.5), 2000, rng), 0.09);
}

TEST(Similar, SectionsOfTheSameQuotient) {
  Rng rng(8);
  const double kc = -1.3;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s(K), sp = wh_section_s_prime(K);
  const auto m = multiplier_from_section(s), mp = multiplier_from_section(sp);
  EXPECT_EQ(similar(m, m, [](const Point&) { return 0.0; }, cube(2, 3.0), 100, rng), 0.0);
  // beta = chi o upsilon with upsilon(x) = s(x)^-1 s'(x) = (p.q/2, 0, 0).
  const auto beta = [&](const Point& x) { return K->character(section_transition(s, sp, x)); };
  EXPECT_NEAR(beta({2.0, 3.0}), kc * 3.0, 1e-15);
  EXPECT_LE(similar(mp, m, beta, cube(2, 3.0), 1000, rng), 1e-12);

  const auto E = make_exotic_tsr(1, {0.0});
  const auto e1 = exotic_section(E), e2 = exotic_section_shifted(E);
  const auto ebeta = [&](const Point& x) { return E->character(section_transition(e1, e2, x)); };
  EXPECT_LE(similar(multiplier_from_section(e2), multiplier_from_section(e1), ebeta, exotic_x_box(), 1000, rng),
            1e-12);
}

TEST(Similar, UnrelatedMultipliersDiffer) {
  Rng rng(9);
  const auto m1 = multiplier_from_section(wh_section_s(make_wh_center(1, 1.0)));
  const auto m2 = multiplier_from_section(wh_section_s(make_wh_center(1, 2.0)));
  EXPECT_GE(similar(m1, m2, [](const Point&) { return 0.0; }, cube(2, 3.0), 200, rng), 0.5);
}

TEST(Conjugate, FlipsPhase) {
  Rng rng(10);
  const double kc = 0.8;
  const auto m = multiplier_from_section(wh_section_s(make_wh_center(1, kc)));
  const auto ms = conjugate(m);
  const auto mss = conjugate(ms);
  for (int i = 0; i < 100; ++i) {
    const Point x = rng.uniform_point(cube(2, 3.0)), y = rng.uniform_point(cube(2, 3.0));
    EXPECT_LE(phase_distance(ms.phase(x, y), kc * x[1] * y[0]), 1e-12);
    EXPECT_EQ(mss.phase(x, y), m.phase(x, y));
  }
  EXPECT_EQ(mss.label, m.label);
  EXPECT_LE(check_cocycle(ms, cube(2, 3.0), 1000, rng), 1e-12);
}

TEST(CentralExtension, ReducedPolarizedWeylHeisenberg) {
  const double kc = 1.0;
  const auto K = make_wh_center(1, kc);
  const auto Xm = central_extension(K->quotient, conjugate(multiplier_from_section(wh_section_s(K))));
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Point g{rng.uniform(0, two_pi), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Point h{rng.uniform(0, two_pi), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Point gh = Xm->product(g, h);
    // tau tau' e^{i kc q p'}
    EXPECT_LE(phase_distance(gh[0], g[0] + h[0] + kc * g[2] * h[1]), 1e-12);
    EXPECT_NEAR(gh[1], g[1] + h[1], 1e-15);
    EXPECT_NEAR(gh[2], g[2] + h[2], 1e-15);
  }
  EXPECT_DOUBLE_EQ(Xm->haar_density({1.0, 0.0, 0.0}), 1.0 / (two_pi * two_pi));
}

TEST(CentralExtension, TrivialMultiplierGivesDirectProductAndModular) {
  const auto X = make_exotic_quotient(1);
  const auto T = central_extension(X, trivial_multiplier(X));
  const Point g{1.0, 0.2, 0.3, 0.4, 2.0}, h{2.0, -0.2, 0.1, 0.5, 0.5};
  const Point gh = T->product(g, h);
  EXPECT_NEAR(gh[0], 3.0, 1e-15);
  const Point xh = X->product({0.2, 0.3, 0.4, 2.0}, {-0.2, 0.1, 0.5, 0.5});
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(gh[1 + i], xh[i], 1e-15);
  EXPECT_DOUBLE_EQ(T->modular(g), X->modular({0.2, 0.3, 0.4, 2.0}));
}

TEST(CentralExtension, SimilarMultipliersGiveIsomorphicExtensions) {
  const double kc = -1.0;
  const auto K = make_wh_center(1, kc);
  const auto s = wh_section_s(K), sp = wh_section_s_prime(K);
  const auto m = multiplier_from_section(sp), mp = multiplier_from_section(s);
  const auto beta = [&](const Point& x) { return K->character(section_transition(s, sp, x)); };
  const auto Gm = central_extension(K->quotient, m), Gmp = central_extension(K->quotient, mp);
  // With m = beta(xy) beta(x)^-1 beta(y)^-1 m', the map (theta, x) -> (theta - beta(x), x) is a homomorphism G_m -> G_m'.
  const auto iso = [&](const Point& g) {
    Point out = g;
    out[0] = g[0] - beta({g[1], g[2]});
    return out;
  };
  Rng rng(12);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point g{rng.uniform(0, two_pi), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const Point h{rng.uniform(0, two_pi), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    worst = std::max(worst, chart_distance(*Gmp, iso(Gm->product(g, h)), Gmp->product(iso(g), iso(h))));
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(SectionCocycle, LandsInSubgroup) {
  Rng rng(13);
  const auto K = make_wh_center(1, -1.0);
  for (const auto& s : {wh_section_s(K), wh_section_s_prime(K)}) {
    const auto& G = *K->ambient;
    EXPECT_EQ(section_cocycle(s, G.identity, {1.0, 2.0})[0], 0.0);
    for (int i = 0; i < 1000; ++i) {
      const Point g = rng.uniform_point(cube(3, 3.0));
      const Point x = rng.uniform_point(cube(2, 3.0));
      EXPECT_NO_THROW(section_cocycle(s, G.inverse(g), x));
    }
  }
  const auto E = make_exotic_tsr(1, {0.5});
  const auto es = exotic_section(E);
  for (int i = 0; i < 1000; ++i) {
    const Point g = rng.uniform_point(exotic_g_box());
    const Point x = rng.uniform_point(exotic_x_box());
    const Point c = E->ambient->product(E->ambient->product(E->ambient->inverse(es(x)), E->ambient->inverse(g)),
                                        es(E->act(g, x)));
    EXPECT_LE(E->offset_from_subgroup(c), 1e-12);
  }
}

TEST(Subgroup, NormalityOfRelativelyCentralSubgroups) {
  Rng rng(14);
  const auto K = make_wh_center(2, 1.0);
  EXPECT_LE(normality_defect(*K, cube(5, 3.0), cube(1, 3.0), 1000, rng), 1e-12);
  const auto E = make_exotic_tsr(1, {0.0});
  EXPECT_LE(normality_defect(*E, exotic_g_box(), cube(3, 2.0), 1000, rng), 1e-12);
}

TEST(Subgroup, ProjectionIsHomomorphismAndSplitsSections) {
  Rng rng(15);
  const auto E = make_exotic_tsr(1, {0.0});
  const auto& G = *E->ambient;
  const auto& X = *E->quotient;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Point g = rng.uniform_point(exotic_g_box()), h = rng.uniform_point(exotic_g_box());
    worst = std::max(worst, chart_distance(X, E->projection(G.product(g, h)), X.product(E->projection(g), E->projection(h))));
    const Point x = rng.uniform_point(exotic_x_box());
    worst = std::max(worst, chart_distance(X, E->projection(exotic_section(E)(x)), x));
    worst = std::max(worst, chart_distance(X, E->projection(exotic_section_shifted(E)(x)), x));
  }
  EXPECT_LE(worst, 1e-12);
  EXPECT_EQ(chart_distance(G, exotic_section(E)(X.identity), G.identity), 0.0);
}

TEST(Defects, KappaAndSectionCocycleStayInSubgroup) {
  Rng rng(16);
  const auto K = make_wh_center(1, -1.0);
  for (const auto& s : {wh_section_s(K), wh_section_s_prime(K)}) {
    EXPECT_LE(kappa_defect(s, cube(2, 3.0), 1000, rng), 1e-12);
    EXPECT_LE(section_cocycle_defect(s, cube(3, 3.0), cube(2, 3.0), 1000, rng), 1e-12);
  }
  const auto E = make_exotic_tsr(1, {0.0});
  EXPECT_LE(kappa_defect(exotic_section(E), exotic_x_box(), 1000, rng), 1e-12);
  EXPECT_LE(section_cocycle_defect(exotic_section_shifted(E), exotic_g_box(), exotic_x_box(), 1000, rng), 1e-12);
  Section bad{"bad", K, [](const Point& x) { return Point{0.0, x[0] * x[0], x[1]}; }};
  EXPECT_GT(kappa_defect(bad, cube(2, 3.0), 100, rng), 0.1);
  EXPECT_LE(delta_iso_defect(2, cube(5, 3.0), 1000, rng), 1e-12);
}

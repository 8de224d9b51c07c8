// Gabor analysis and synthesis modulo the center of the Weyl-Heisenberg group.
//
// The Schroedinger representation U with character kcheck is pulled back along the
// section s to a projective representation P of phase space X = P x Q. Every nonzero
// vector is admissible there, with Duflo-Moore operator |kcheck|^{-1/2}.

#include <cstdio>

#include "sqint/sqint.hpp"

using namespace sqint;

int main() {
  const double kcheck = -1.0;
  const auto K = make_wh_center(1, kcheck);
  const auto P = projective_from_section(wh_rep(1, kcheck), wh_section_s(K));

  // A two-atom chirp-like signal on 256 samples of [-16, 16).
  const auto grid = periodic_grid({{-16, 16}}, {256});
  const auto signal = gaussian(grid, {-2.0}, {1.5}) + cplx(0.0, 0.6) * gaussian(grid, {2.5}, {-1.0}, 0.7);
  const auto psi = gaussian(grid);
  const double dm = duflo_moore_gabor(kcheck).apply(psi).norm();

  const auto phase_space = haar_grid(*K->quotient, {{-10, 10}, {-10, 10}}, {80, 80});
  const auto coeffs = analyze(*P, psi, signal, phase_space, "gaussian", dm);
  const auto back = synthesize(coeffs, *P, psi);

  std::printf("phase-space nodes:    %zu\n", coeffs.grid.size());
  std::printf("energy ratio:         %.12f\n", energy_ratio(coeffs, signal));
  std::printf("round-trip rel. err.: %.3e\n", distance(back, signal) / signal.norm());
  std::printf("outer-shell energy:   %.3e\n", coeffs.tail_estimate);

  // The multiplier relation P(x) P(y) = exp(-i m(x, y)) P(xy) holds exactly.
  const Point x{0.7, -1.2}, y{-0.4, 0.9};
  const auto lhs = P->apply(x, P->apply(y, signal));
  const auto rhs = unit(-P->multiplier().phase(x, y)) * P->apply(K->quotient->product(x, y), signal);
  std::printf("multiplier relation:  %.3e\n", distance(lhs, rhs) / signal.norm());
  return 0;
}

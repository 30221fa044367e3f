#pragma once

#include <complex>

#include "greenprop/errors.hpp"

namespace greenprop {

using cplx = std::complex<double>;

struct SpecFunFlags {
  bool pole_proximity = false;    // argument within 1e-3 of a pole
  bool truncated_series = false;  // series tail bound exceeded 1e-14 relative
  bool asymptotic_branch = false; // large-argument expansion was used
};

// Every special-function evaluation returns an error estimate and evaluation
// flags rather than silently degrading: downstream quadratures weight
// contributions by est_error.
struct SpecFunResult {
  cplx value{0.0, 0.0};
  double est_error = 0.0;  // absolute
  SpecFunFlags flags;
};

// Gamma(z) for complex z (Lanczos approximation, reflection for Re z < 1/2).
// >= 12 significant digits away from poles; pole_proximity flagged within
// distance 1e-3 of a pole; evaluation AT a non-positive integer throws
// NumericalError naming the pole index.
SpecFunResult gamma_complex(cplx z);

// Confluent hypergeometric (Kummer) function Phi(a, b, z) == M(a, b, z).
// Power series with the e^z * Phi(b-a, b, -z) transformation when Re z < 0
// (which keeps the series terms single-signed for real arguments), and the
// large-|z| asymptotic expansion beyond |z| = 40 (asymptotic_branch flagged).
// b at a non-positive integer throws ValidationError.
SpecFunResult kummer_m(cplx a, cplx b, cplx z);

// Parabolic cylinder function D_p(z) for complex order p and real argument z.
// Branches (calibrated so the estimated error is minimal at every z):
//  -8.5 < z < 5: two-term Kummer representation, accumulated in extended
//      precision, anchored at
//      D_p(0) = 2^{p/2} sqrt(pi) / Gamma((1-p)/2),
//      D_p'(0) = -2^{(p+1)/2} sqrt(pi) / Gamma(-p/2);
//  5 <= z < 8: both the Kummer representation and the Poincare asymptotic
//      series e^{-z^2/4} z^p (1 + ...) are evaluated and the branch with the
//      smaller error estimate wins (the crossover point depends on p);
//  z >= 8: Poincare asymptotic series alone;
//  z <= -8.5: reflection through the connection formula
//      D_p(-x) = cos(pi p) D_p(x) + (pi/Gamma(-p)) V(-p-1/2, x)
//  with the asymptotic series of the companion solution V.
// Orders with |p| beyond the configured maximum (200) throw ValidationError.
SpecFunResult parabolic_cylinder_d(cplx p, double z);

// d/dz D_p(z) via the recurrence dD_p/dz = -D_{p+1}(z) + (z/2) D_p(z)
// (never finite differences).
SpecFunResult parabolic_cylinder_d_deriv(cplx p, double z);

// Physicists' Hermite polynomial H_n(y) by the three-term recurrence
// H_{n+1} = 2 y H_n - 2 n H_{n-1}. Overflow raises NumericalError; n above
// the configured maximum (500) raises ValidationError.
double hermite_h(int n, double y);

// Complementary error function of a complex argument, valid in the whole
// plane; accuracy >= 1e-12 for |z| <= 10.
SpecFunResult erfc_complex(cplx z);

// Scaled complement erfcx(z) = e^{z^2} erfc(z), numerically stable for
// Re z >= 0 (|z| unrestricted); for Re z < 0 the unscaled reflection is used
// internally and may overflow for large |z| (range error).
SpecFunResult erfcx_complex(cplx z);

// Faddeeva function w(z) = e^{-z^2} erfc(-i z) for Im z >= -1 (the upper
// half-plane and a shallow strip below the real axis); building block of the
// erfc evaluations, exposed for diagnostics and tests.
cplx faddeeva_w(cplx z);

}  // namespace greenprop

#pragma once

#include <complex>
#include <functional>

#include "greenprop/errors.hpp"
#include "greenprop/propagator.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

// Quadrature scheme used to invert an energy-domain kernel back to time.
enum class ContourScheme { trapezoid_line, talbot, k_line };

// Geometry of the energy-plane contour for bromwich_quadrature.
//
// The mathematical contour is the horizontal line Im E = hbar * offset_c
// above every pole of the Green function. Its left end diverges for damped
// time, so the implementation folds that end down around the spectrum: with
// C = hbar * offset_c the curve
//   E(v) = sqrt(v^2 + a^2) - (a + 4C) + i C v / sqrt(v^2 + a^2),   a = 2C,
// runs flat at Im E = -C for v << 0, crosses the real axis at Re E = -4C
// (left of every catalog spectrum), and exits flat at Im E = +C — the same
// wrap as two horizontal arms plus a left cap, but as a single corner-free
// analytic curve, which is what lets the trapezoid rule converge
// geometrically. The fold crosses no singularities, so the value equals the
// textbook line integral wherever the latter converges.
struct ContourSpec {
  double offset_c = 1.0;  // line height above the poles, in units of energy/hbar
  // Truncation half-extent of the fold parameter (energy units; the arms
  // reach Re E ~ half_width - 6*hbar*offset_c); 0 = auto, chosen so the
  // truncated ends carry < 1e-12 of the contour peak.
  double half_width = 0.0;
  int n_nodes = 64;  // across the whole fold; >= 16 and even
  ContourScheme scheme = ContourScheme::trapezoid_line;
  // Successive node-doubling stops once the result moves less than this
  // relative amount. 0 disables refinement (evaluate at exactly n_nodes);
  // the quadrature-order diagnostics in the tests rely on that mode.
  double rel_tol = 1e-10;
};

// Energy-domain kernel evaluator: E -> G(x, x', E) with (x, x') bound inside.
using GreenEvaluator = std::function<cplx(cplx)>;

// Inverse transform K = (1/(2 pi i hbar)) Int e^{-i E t / hbar} G(E) dE over
// the folded contour described on ContourSpec, by composite trapezoid with
// compensated accumulation. est_error is the last grid-refinement increment;
// terms_used the final node count. Requires Im t < 0 strictly (the damping
// that makes the arms integrable; ValidationError otherwise). If the
// arm-end integrand fails to fall below 1e-3 of the contour peak the
// truncation is meaningless and ConvergenceError is raised. x and x_prime
// are carried into the returned record only — the integrand closure already
// binds them.
PropagatorEval bromwich_quadrature(const GreenEvaluator& green, cplx t,
                                   const ContourSpec& spec,
                                   const UnitsConfig& units, double x = 0.0,
                                   double x_prime = 0.0);

// Which integrand family k_line_quadrature inverts.
enum class KLineIntegrand { free, delta };

// Momentum-line inversion of the free or point-interaction kernel:
//   K = (1/(2 pi)) Int_R e^{-i hbar k^2 t / (2 m)}
//         [ e^{i k |x-x'|} - (i a / (k + i a)) e^{i k (|x|+|x'|)} ] dk,
// a = m b / hbar^2 (the bracketed correction only for the delta tag; its
// pole sits at k = -i a, safely below the real line for b > 0). The substitution
// E = hbar^2 k^2 / (2 m) maps the two rims of the positive energy axis onto
// the full k-line, which is legitimate precisely because this kernel has no
// bound-state poles. Truncated where the Gaussian damping factor reaches
// 1e-15 of its peak; trapezoid nodes doubled until the result settles to
// ~1e-13 relative. Requires t != 0, Im t <= 0, and b > 0 for the delta tag
// (ValidationError); exactly real t never damps the Gaussian and raises
// ConvergenceError.
PropagatorEval k_line_quadrature(double x, double x_prime, cplx t,
                                 KLineIntegrand kind, double b,
                                 const UnitsConfig& units);

// Fixed-Talbot inversion of a Laplace-domain evaluator gbar(s) at tau > 0:
//   f(tau) = (1/(2 pi i)) Int e^{s tau} gbar(s) ds
// over the deformed contour s(theta) = r theta (cot theta + i),
// theta in (-pi, pi), r = 2 M / (5 tau), with a full complex midpoint rule
// (gbar need not have conjugate symmetry). M grows with the requested digits
// (~0.6 decimal digits per node pair). Valid when every singularity of gbar
// lies on the negative real axis or left of the contour — true for the
// Euclidean kernel pairing gbar(s) = G(x, x', -hbar s), whose poles map to
// s = -E_n / hbar <= 0. Non-finite evaluations raise NumericalError; tau <= 0
// raises ValidationError.
cplx talbot_invert(const std::function<cplx(cplx)>& gbar, double tau,
                   int digits = 12);

}  // namespace greenprop

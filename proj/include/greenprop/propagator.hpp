#pragma once

#include <complex>
#include <string>

#include "greenprop/errors.hpp"
#include "greenprop/greens.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

// How a propagator value was produced.
enum class PropagatorMethod {
  closed_free,
  closed_delta,
  closed_harmonic,
  spectral_sum,
  inverse_laplace,
};

std::string to_string(PropagatorMethod method);

// One evaluated time-domain kernel value K(x, x', t). `point.param` holds the
// (possibly complex) time. `terms_used` is 0 for closed forms and the number
// of series terms for the spectral sum; `est_error` is an absolute estimate.
struct PropagatorEval {
  EvalPoint point;
  cplx value{0.0, 0.0};
  PropagatorMethod method = PropagatorMethod::closed_free;
  int terms_used = 0;
  double est_error = 0.0;
};

// Truncation controls for the oscillator spectral sum. `damping` is added to
// the evolution time as t -> t - i*damping; the series converges geometrically
// only when the effective |e^{-i w t}| < 1, i.e. Im t < 0 or damping > 0.
struct SpectralSumConfig {
  int n_max = 60;
  double damping = 0.0;
};

// Free-particle kernel sqrt(m/(2 pi i hbar t)) exp(i m (x-x')^2 / (2 hbar t)).
// Principal square root: phase e^{-i pi/4} for real t > 0. Requires Im t <= 0
// and t != 0 (ValidationError; the t -> 0 limit is a delta distribution).
PropagatorEval propagator_free(double x, double x_prime, cplx t,
                               const UnitsConfig& units);

// Kernel for a repulsive point interaction b*delta(x) on the line: the free
// kernel plus a correction proportional to erfcx evaluated at
// zeta = sqrt(m/(2 i hbar t)) (|x| + |x'| + i b t / hbar):
//   K = K0 - (m b / 2 hbar^2) exp(i m (|x|+|x'|)^2 / (2 hbar t)) erfcx(zeta).
// Requires b > 0, Im t <= 0, t != 0 (ValidationError). Deep in the erfcx
// reflection region the unscaled exponential may overflow (NumericalError).
PropagatorEval propagator_delta(double x, double x_prime, cplx t, double b,
                                const UnitsConfig& units);

// Oscillator kernel
//   sqrt(m w / (2 pi i hbar sin(w t)))
//     * exp{ i m w [ (x^2+x'^2) cos(w t) - 2 x x' ] / (2 hbar sin(w t)) },
// evaluated in the caustic-safe variable rho = e^{-i w t}: the prefactor is
// computed as e^{-i w t / 2} (1 - rho^2)^{-1/2}, which is the continuous
// continuation in t from t = -i0+ (principal value is safe because
// Re(1 - rho^2) >= 0 whenever |rho| <= 1), so the quarter-period phase jumps
// across caustics come out right without branch tracking. Requires omega > 0
// and Im t <= 0 (|rho| <= 1 is what makes the principal branch safe);
// |sin(w t)| < 1e-10 (a caustic, where the kernel degenerates to a
// distribution) raises NumericalError.
PropagatorEval propagator_harmonic(double x, double x_prime, cplx t,
                                   double omega, const UnitsConfig& units);

// Weight (-1)^n / n! carried by the n-th bound-state pole of Gamma(-p) in the
// oscillator residue sum. Exact factorial arithmetic up to n = 170, a
// log-gamma exponential beyond (underflows to 0 near n = 180, below double's
// representable range). n outside [0, 500] raises ValidationError.
double residue_weights(int n);

// Oscillator kernel as the truncated bound-state residue series
//   sqrt(m w / (pi hbar)) e^{-(y^2+y'^2)/2}
//     Sum_{n=0}^{n_max} htilde_n(y) htilde_n(y') e^{-i w (n+1/2) (t - i eps)},
// with y = sqrt(m w / hbar) x and htilde_n = H_n / sqrt(2^n n!) the
// normalized Hermite polynomials (three-term recurrence, overflow-free for
// arguments inside the classical region of level n_max). terms_used = n_max+1;
// est_error = magnitude of the last retained term. A configuration with
// |e^{-i w (t - i eps)}| >= 1 cannot converge and raises ConvergenceError.
PropagatorEval spectral_sum_harmonic(double x, double x_prime, cplx t,
                                     double omega, const UnitsConfig& units,
                                     const SpectralSumConfig& cfg);

// Partial sum of Sum_n H_n(z) H_n(z') xi^n / n!, accumulated in the
// overflow-free normalized form htilde_n(z) htilde_n(z') (2 xi)^n.
// Requires |xi| < 1/2 strictly (the identity's convergence disc) and
// 0 <= n_max <= 500; violations raise ValidationError.
cplx mehler_sum(double z, double z_prime, cplx xi, int n_max);

// Closed form of the same sum:
//   (1 - 4 xi^2)^{-1/2} exp{ [4 xi z z' - 4 xi^2 (z^2+z'^2)] / (1 - 4 xi^2) }.
// Same |xi| < 1/2 requirement.
cplx mehler_closed(double z, double z_prime, cplx xi);

}  // namespace greenprop

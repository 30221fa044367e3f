#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "greenprop/errors.hpp"
#include "greenprop/potential.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

using cplx = std::complex<double>;

// Fundamental pair of homogeneous solutions at fixed energy:
//   u_minus decays (or radiates) towards x -> -inf,
//   u_plus  decays (or radiates) towards x -> +inf.
// Any nonzero multiples are valid modes; the assembled kernel divides the
// normalization out via the Wronskian.
struct ModePair {
  std::function<cplx(double)> u_minus;
  std::function<cplx(double)> u_plus;
  std::function<cplx(double)> du_minus;
  std::function<cplx(double)> du_plus;
  cplx wronskian{0.0, 0.0};  // u_minus u_plus' - u_plus u_minus'
  cplx energy{0.0, 0.0};
  std::string convention_note;
};

enum class GreenMethod {
  closed_free,
  closed_harmonic,
  delta_dressed,
  numerical_modes,
};

std::string to_string(GreenMethod method);

struct GreenEval {
  EvalPoint point;           // param carries the energy
  cplx value{0.0, 0.0};
  GreenMethod method = GreenMethod::closed_free;
  double est_error = 0.0;
};

// k(E) = sqrt(2 m E) / hbar on the physical sheet (Im k >= 0 everywhere, so
// e^{i k |x|} never grows at infinity).
cplx wavenumber(cplx energy, const UnitsConfig& units);

// Recompute the Wronskian at each probe abscissa, enforce that the relative
// spread stays below 1e-6 (it is exactly constant in exact arithmetic), and
// return the mean. Throws NumericalError on drift.
cplx wronskian(const ModePair& pair, const std::vector<double>& probes);

// G(x, x') = -(2m/hbar) u_minus(x_<) u_plus(x_>) / W.
GreenEval assemble_green(const ModePair& pair, const EvalPoint& point,
                         const UnitsConfig& units,
                         GreenMethod method = GreenMethod::numerical_modes);

// Closed forms -------------------------------------------------------------

// Free line: G = (i m / (hbar k)) e^{i k |x - x'|}.
GreenEval green_free(const EvalPoint& point, cplx energy,
                     const UnitsConfig& units);

// Harmonic well: G = sqrt(m/(pi hbar w)) Gamma(-p) D_p(z_>) D_p(-z_<) with
// p = E/(hbar w) - 1/2 and z = sqrt(2 m w / hbar) x. Energies whose order p
// lies within 1e-3 of a non-negative integer (i.e. E within 1e-3 hbar w of a
// bound state) throw NumericalError rather than returning a near-pole value.
GreenEval green_harmonic(const EvalPoint& point, cplx energy, double omega,
                         const UnitsConfig& units);

// Point interaction b delta(x) dressed over a free or harmonic background:
//   G_b = G_bg - (b/hbar) G_bg(x,0) G_bg(0,x') / (1 + (b/hbar) G_bg(0,0)).
// The model must be of Delta kind; its background selects G_bg.
GreenEval green_delta_dress(const PotentialModel& model, const EvalPoint& point,
                            cplx energy, const UnitsConfig& units);

// Mode factories ------------------------------------------------------------

ModePair make_free_modes(cplx energy, const UnitsConfig& units);
ModePair make_harmonic_modes(cplx energy, double omega,
                             const UnitsConfig& units);

// Numerically integrated modes for smooth potentials (Free, Harmonic or
// Custom; Delta is rejected because the kink cannot be resolved by a smooth
// integrator). The two solutions are seeded at the domain ends with
// first-order WKB ratios u'/u = ±i k_loc - k_loc'/(2 k_loc) and integrated
// inward (the contracting direction). Values are stored on a uniform grid of
// n_points and interpolated with quintic cells that honor u'' = q u at the
// nodes. The domain is the custom table range, or [-10, 10] for Free and
// Harmonic models.
ModePair solve_custom_modes(const PotentialModel& model, cplx energy,
                            const UnitsConfig& units, int n_points = 8001);

// Diagnostics ---------------------------------------------------------------

// Relative defect of the derivative jump of G at x': the one-sided
// derivatives are formed with second-order three-point stencils at steps h
// and h/2 and Richardson-combined; the result is
//   | [dG/dx]_{x'} - (-2m/hbar) | / (2m/hbar).
double jump_residual(const std::function<cplx(double)>& g_of_x, double x_prime,
                     const UnitsConfig& units, double h = 1e-3);

// Dispatch over the potential catalog: closed forms where they exist,
// numerically integrated modes for Custom models or when force_numerical is
// set (Delta + force_numerical is rejected).
GreenEval evaluate_green(const PotentialModel& model, const EvalPoint& point,
                         cplx energy, const UnitsConfig& units,
                         bool force_numerical = false);

}  // namespace greenprop

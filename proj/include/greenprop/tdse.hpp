#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "greenprop/errors.hpp"
#include "greenprop/potential.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

using cplx = std::complex<double>;

// Time-domain kernel evaluator: (x, x', t) -> K(x, x', t).
using PropagatorKernel = std::function<cplx(double, double, cplx)>;

// A wavefunction sampled on a uniform grid. `norm` caches the trapezoid L2
// norm of `values`; the state is only valid while the two agree (to 1e-12)
// and while the boundary samples stay below 1e-8 of the peak amplitude --
// the contained regime in which Dirichlet walls do not contaminate the
// evolution.
struct WavefunctionState {
  Grid1D grid;
  std::vector<cplx> values;
  double time = 0.0;
  double norm = 0.0;
};

// Sample `psi` on the grid (optionally rescaling to unit L2 norm), cache the
// norm, and enforce the containment invariant. Throws ValidationError when
// the sampled state touches the boundary.
WavefunctionState make_state(const Grid1D& grid,
                             const std::function<cplx(double)>& psi,
                             double time = 0.0, bool normalize = false);

// Trapezoid L2 norm of the sampled values.
double state_norm(const WavefunctionState& state);

enum class BoundaryKind { reflecting, absorbing_layer };

// reflecting: hard Dirichlet walls at the grid ends (unitary evolution, with
// norm-drift and containment self-checks). absorbing_layer: a negative
// imaginary potential ramp -i * strength * (d / width)^2 inside `width` of
// each wall; norm then decays by design and the containment checks are
// waived.
struct BoundaryConfig {
  BoundaryKind kind = BoundaryKind::reflecting;
  double width = 0.0;
  double strength = 0.0;
};

struct EvolveConfig {
  double dt = 1e-4;
  int n_steps = 1;
  BoundaryConfig boundary{};
};

// Crank-Nicolson step (I + i dt H / 2 hbar) psi' = (I - i dt H / 2 hbar) psi
// with a second-order finite-difference H, solved by a pre-factored
// tridiagonal elimination. A Delta model enters through its derivative-jump
// interface condition folded into the x = 0 matrix row (the strength divided
// by the cell size), never as a smeared potential; the zero node must lie on
// the grid. Preconditions: state invariants hold and
// dt * (max|V| + hbar^2 / (2 m spacing^2)) / hbar <= 0.5 (ValidationError).
// With reflecting walls the run aborts with NumericalError if the norm
// drifts by more than 1e-6 relative or the boundary amplitude exceeds 1e-6
// of the peak (containment policy: abort rather than silently reflect).
WavefunctionState evolve_crank_nicolson(const WavefunctionState& psi0,
                                        const PotentialModel& model,
                                        const EvolveConfig& cfg,
                                        const UnitsConfig& units);

// Local quadrature refinement for kernels that are not smooth everywhere:
// cells straddling a listed cusp abscissa (the x = 0 kink of the
// point-interaction kernel), and -- when refine_diagonal is set -- cells
// with x' near the output point x, where a short-time kernel is much
// narrower than the grid. Flagged cells are re-integrated on a
// refine_factor-times finer sub-grid with cubic interpolation of psi0.
struct ConvolveOptions {
  std::vector<double> cusp_points{};
  bool refine_diagonal = false;
  int refine_factor = 4;
};

// psi(x, t0 + t) = Int K(x, x', t) psi0(x') dx' by trapezoid over the grid
// (plus the optional local refinement). Kernel exceptions (e.g. the singular
// t = 0 limit) propagate unchanged.
WavefunctionState apply_propagator(const PropagatorKernel& kernel,
                                   const WavefunctionState& psi0, cplx t,
                                   const ConvolveOptions& options = {});

// L2 distance between two states on the identical grid, both raw and
// minimized over a single global phase (the aligned variant is
// sqrt(|a|^2 + |b|^2 - 2 |<b, a>|)).
struct L2Distance {
  double plain = 0.0;
  double phase_aligned = 0.0;
};
L2Distance compare_l2(const WavefunctionState& a, const WavefunctionState& b);

// |[-(hbar^2/2m) d^2/dx^2 + V(x) - i hbar d/dt] K(x, x', t)| by symmetric
// second-order stencils of half-width h (space) and dt (time); the expected
// magnitude for an exact kernel is O(h^2) + O(dt^2).
double schrodinger_residual(const PropagatorKernel& kernel,
                            const PotentialModel& model, double x,
                            double x_prime, cplx t, double h, double dt,
                            const UnitsConfig& units);

// Short-time delta-family probe: errors e_k = |Int K(x, x', -i tau_k) f(x')
// dx' - f(x)| for a strictly decreasing positive tau list. The heat-kernel
// expansion makes e_k ~ tau_k |H f(x)| / hbar, so the sequence must decrease
// ~ linearly; a non-monotone sequence (beyond a small noise floor) raises
// NumericalError.
std::vector<double> delta_limit_check(const PropagatorKernel& kernel,
                                      const std::function<double(double)>& f,
                                      double x,
                                      const std::vector<double>& tau_list);

}  // namespace greenprop

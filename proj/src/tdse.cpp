#include "greenprop/tdse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace greenprop {

namespace {

constexpr double kContainmentAbort = 1e-6;   // runtime boundary-amplitude cap
constexpr double kContainmentBuild = 1e-8;   // construction-time cap
constexpr double kNormDriftAbort = 1e-6;     // relative, reflecting runs only

double trapezoid_norm(const std::vector<cplx>& values, double spacing) {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = (i == 0 || i + 1 == values.size()) ? 0.5 : 1.0;
    acc += w * std::norm(values[i]);
  }
  return std::sqrt(acc * spacing);
}

double peak_amplitude(const std::vector<cplx>& values) {
  double peak = 0.0;
  for (const cplx& v : values) {
    peak = std::max(peak, std::abs(v));
  }
  return peak;
}

double boundary_amplitude(const std::vector<cplx>& values) {
  const std::size_t n = values.size();
  return std::max(std::max(std::abs(values.front()), std::abs(values[1])),
                  std::max(std::abs(values.back()), std::abs(values[n - 2])));
}

void require_valid_state(const WavefunctionState& state, const char* who) {
  if (state.grid.n_points < 16 ||
      static_cast<std::size_t>(state.grid.n_points) != state.values.size()) {
    throw ValidationError(std::string(who) +
                          ": state values do not match its grid");
  }
  const double norm = trapezoid_norm(state.values, state.grid.spacing);
  if (std::abs(norm - state.norm) > 1e-12 * std::max(1.0, norm)) {
    throw ValidationError(std::string(who) +
                          ": cached norm disagrees with the sampled values");
  }
}

// Cubic (4-point Lagrange) interpolation of the sampled state inside cell j,
// clamped at the grid ends; local coordinate u in [0, 1].
cplx interpolate_cell(const std::vector<cplx>& values, int j, double u) {
  const int n = static_cast<int>(values.size());
  const int j0 = std::clamp(j - 1, 0, n - 4);
  const double s = u + static_cast<double>(j - j0);  // offset from node j0
  const cplx f0 = values[j0];
  const cplx f1 = values[j0 + 1];
  const cplx f2 = values[j0 + 2];
  const cplx f3 = values[j0 + 3];
  const double c0 = -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0;
  const double c1 = s * (s - 2.0) * (s - 3.0) / 2.0;
  const double c2 = -s * (s - 1.0) * (s - 3.0) / 2.0;
  const double c3 = s * (s - 1.0) * (s - 2.0) / 6.0;
  return c0 * f0 + c1 * f1 + c2 * f2 + c3 * f3;
}

}  // namespace

WavefunctionState make_state(const Grid1D& grid,
                             const std::function<cplx(double)>& psi,
                             double time, bool normalize) {
  if (grid.n_points < 16) {
    throw ValidationError("make_state: grid must have at least 16 nodes");
  }
  WavefunctionState state;
  state.grid = grid;
  state.values.resize(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    state.values[static_cast<std::size_t>(i)] = psi(grid.node(i));
  }
  state.time = time;
  double norm = trapezoid_norm(state.values, grid.spacing);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ValidationError("make_state: state has zero or non-finite norm");
  }
  if (normalize) {
    for (cplx& v : state.values) {
      v /= norm;
    }
    norm = 1.0;
  }
  state.norm = norm;
  if (boundary_amplitude(state.values) >
      kContainmentBuild * peak_amplitude(state.values)) {
    throw ValidationError(
        "make_state: state touches the grid boundary (amplitude above 1e-8 "
        "of the peak); enlarge the grid");
  }
  return state;
}

double state_norm(const WavefunctionState& state) {
  return trapezoid_norm(state.values, state.grid.spacing);
}

WavefunctionState evolve_crank_nicolson(const WavefunctionState& psi0,
                                        const PotentialModel& model,
                                        const EvolveConfig& cfg,
                                        const UnitsConfig& units) {
  require_valid_state(psi0, "evolve_crank_nicolson");
  if (!(cfg.dt > 0.0)) {
    throw ValidationError("evolve_crank_nicolson: dt must be positive");
  }
  if (cfg.n_steps < 1) {
    throw ValidationError("evolve_crank_nicolson: n_steps must be >= 1");
  }
  const bool absorbing = cfg.boundary.kind == BoundaryKind::absorbing_layer;
  if (absorbing &&
      (!(cfg.boundary.width > 0.0) || !(cfg.boundary.strength > 0.0))) {
    throw ValidationError(
        "evolve_crank_nicolson: absorbing_layer requires positive width and "
        "strength");
  }

  const Grid1D& grid = psi0.grid;
  const int n = grid.n_points;
  const double dx = grid.spacing;
  const double hbar = units.hbar;
  const double mass = units.mass;

  // Diagonal potential, with the point interaction folded into its node as
  // the discrete form of the derivative-jump interface condition.
  std::vector<cplx> vdiag(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    vdiag[static_cast<std::size_t>(i)] =
        potential_value(model, grid.node(i), units);
  }
  if (model.kind() == PotentialModel::Kind::Delta) {
    const int j0 = static_cast<int>(std::lround(-grid.x_min / dx));
    if (j0 < 1 || j0 > n - 2 || std::abs(grid.node(j0)) > 0.25 * dx) {
      throw ValidationError(
          "evolve_crank_nicolson: the interaction point x = 0 must lie on an "
          "interior grid node");
    }
    vdiag[static_cast<std::size_t>(j0)] += model.delta_strength() / dx;
  }
  if (absorbing) {
    for (int i = 0; i < n; ++i) {
      const double d_lo = grid.node(i) - grid.x_min;
      const double d_hi = grid.x_max - grid.node(i);
      const double d = std::min(d_lo, d_hi);
      if (d < cfg.boundary.width) {
        const double ramp = (cfg.boundary.width - d) / cfg.boundary.width;
        vdiag[static_cast<std::size_t>(i)] +=
            cplx(0.0, -cfg.boundary.strength * ramp * ramp);
      }
    }
  }

  double vmax = 0.0;
  for (const cplx& v : vdiag) {
    vmax = std::max(vmax, std::abs(v));
  }
  const double kinetic_scale = hbar * hbar / (2.0 * mass * dx * dx);
  if (cfg.dt * (vmax + kinetic_scale) / hbar > 0.5) {
    throw ValidationError(
        "evolve_crank_nicolson: dt * (max|V| + hbar^2/(2 m dx^2)) / hbar "
        "exceeds 0.5; reduce dt or coarsen the grid");
  }

  // H rows (Dirichlet walls): off = -hbar^2/(2 m dx^2),
  // diag_i = hbar^2/(m dx^2) + V_i. A = I + i dt H / (2 hbar), B = 2I - A.
  const cplx lambda = cplx(0.0, 1.0) * cfg.dt / (2.0 * hbar);
  const cplx off_a = lambda * (-kinetic_scale);
  std::vector<cplx> diag_a(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    diag_a[static_cast<std::size_t>(i)] =
        1.0 + lambda * (2.0 * kinetic_scale + vdiag[static_cast<std::size_t>(i)]);
  }

  // Pre-factored Thomas elimination (A is step-independent).
  std::vector<cplx> upper(static_cast<std::size_t>(n));
  std::vector<cplx> pivot(static_cast<std::size_t>(n));
  pivot[0] = diag_a[0];
  upper[0] = off_a / pivot[0];
  for (int i = 1; i < n; ++i) {
    pivot[static_cast<std::size_t>(i)] =
        diag_a[static_cast<std::size_t>(i)] -
        off_a * upper[static_cast<std::size_t>(i - 1)];
    upper[static_cast<std::size_t>(i)] = off_a / pivot[static_cast<std::size_t>(i)];
  }

  std::vector<cplx> psi = psi0.values;
  std::vector<cplx> rhs(static_cast<std::size_t>(n));
  const double norm0 = psi0.norm;
  const int check_every = 25;

  for (int step = 0; step < cfg.n_steps; ++step) {
    // rhs = B psi = (2I - A) psi with Dirichlet neighbors beyond the walls.
    for (int i = 0; i < n; ++i) {
      const cplx left = (i > 0) ? psi[static_cast<std::size_t>(i - 1)] : cplx{};
      const cplx right =
          (i + 1 < n) ? psi[static_cast<std::size_t>(i + 1)] : cplx{};
      rhs[static_cast<std::size_t>(i)] =
          (2.0 - diag_a[static_cast<std::size_t>(i)]) *
              psi[static_cast<std::size_t>(i)] -
          off_a * (left + right);
    }
    // Forward substitution, then back substitution.
    rhs[0] /= pivot[0];
    for (int i = 1; i < n; ++i) {
      rhs[static_cast<std::size_t>(i)] =
          (rhs[static_cast<std::size_t>(i)] -
           off_a * rhs[static_cast<std::size_t>(i - 1)]) /
          pivot[static_cast<std::size_t>(i)];
    }
    for (int i = n - 2; i >= 0; --i) {
      rhs[static_cast<std::size_t>(i)] -=
          upper[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i + 1)];
    }
    psi.swap(rhs);

    if (!absorbing &&
        (step % check_every == check_every - 1 || step + 1 == cfg.n_steps)) {
      if (boundary_amplitude(psi) > kContainmentAbort * peak_amplitude(psi)) {
        throw NumericalError(
            "evolve_crank_nicolson: wavefunction reached the grid boundary "
            "(amplitude above 1e-6 of the peak); enlarge the grid or add an "
            "absorbing layer");
      }
      const double norm = trapezoid_norm(psi, dx);
      if (std::abs(norm - norm0) > kNormDriftAbort * norm0) {
        throw NumericalError(
            "evolve_crank_nicolson: norm drifted by more than 1e-6 relative; "
            "the unitary step degraded numerically");
      }
    }
  }

  WavefunctionState out;
  out.grid = grid;
  out.values = std::move(psi);
  out.time = psi0.time + cfg.dt * static_cast<double>(cfg.n_steps);
  out.norm = trapezoid_norm(out.values, dx);
  return out;
}

WavefunctionState apply_propagator(const PropagatorKernel& kernel,
                                   const WavefunctionState& psi0, cplx t,
                                   const ConvolveOptions& options) {
  require_valid_state(psi0, "apply_propagator");
  if (options.refine_factor < 2) {
    throw ValidationError("apply_propagator: refine_factor must be >= 2");
  }
  const Grid1D& grid = psi0.grid;
  const int n = grid.n_points;
  const double dx = grid.spacing;

  // Cells needing sub-grid treatment independently of the output point.
  std::vector<char> cusp_cell(static_cast<std::size_t>(n - 1), 0);
  for (const double c : options.cusp_points) {
    for (int j = 0; j < n - 1; ++j) {
      if (grid.node(j) - 0.5 * dx <= c && c < grid.node(j + 1) + 0.5 * dx) {
        cusp_cell[static_cast<std::size_t>(j)] = 1;
      }
    }
  }
  // Kernel width scale for the optional diagonal refinement.
  const double kernel_width = std::sqrt(std::abs(t));
  const double diag_radius = 4.0 * kernel_width + 2.0 * dx;
  const bool refine_diag = options.refine_diagonal && kernel_width < 8.0 * dx;

  WavefunctionState out;
  out.grid = grid;
  out.values.assign(static_cast<std::size_t>(n), cplx{});
  const int sub = options.refine_factor;

  for (int i = 0; i < n; ++i) {
    const double x = grid.node(i);
    cplx acc{};
    std::vector<cplx> row(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      row[static_cast<std::size_t>(j)] = kernel(x, grid.node(j), t);
      const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      acc += w * row[static_cast<std::size_t>(j)] *
             psi0.values[static_cast<std::size_t>(j)];
    }
    acc *= dx;

    for (int j = 0; j < n - 1; ++j) {
      const bool flagged =
          cusp_cell[static_cast<std::size_t>(j)] ||
          (refine_diag && std::abs(grid.node(j) - x) <= diag_radius);
      if (!flagged) {
        continue;
      }
      // Replace this cell's trapezoid share with a refined sub-trapezoid.
      const cplx coarse = 0.5 * dx *
                          (row[static_cast<std::size_t>(j)] *
                               psi0.values[static_cast<std::size_t>(j)] +
                           row[static_cast<std::size_t>(j + 1)] *
                               psi0.values[static_cast<std::size_t>(j + 1)]);
      cplx fine{};
      const double h = dx / static_cast<double>(sub);
      for (int s = 0; s <= sub; ++s) {
        const double u = static_cast<double>(s) / static_cast<double>(sub);
        const double xp = grid.node(j) + u * dx;
        const cplx value = (s == 0)
                               ? row[static_cast<std::size_t>(j)] *
                                     psi0.values[static_cast<std::size_t>(j)]
                           : (s == sub)
                               ? row[static_cast<std::size_t>(j + 1)] *
                                     psi0.values[static_cast<std::size_t>(j + 1)]
                               : kernel(x, xp, t) *
                                     interpolate_cell(psi0.values, j, u);
        const double w = (s == 0 || s == sub) ? 0.5 : 1.0;
        fine += w * value;
      }
      acc += fine * h - coarse;
    }
    out.values[static_cast<std::size_t>(i)] = acc;
  }

  out.time = psi0.time + t.real();
  out.norm = trapezoid_norm(out.values, dx);
  return out;
}

L2Distance compare_l2(const WavefunctionState& a, const WavefunctionState& b) {
  if (a.grid.n_points != b.grid.n_points || a.grid.x_min != b.grid.x_min ||
      a.grid.x_max != b.grid.x_max) {
    throw ValidationError("compare_l2: states live on different grids");
  }
  const double dx = a.grid.spacing;
  double diff2 = 0.0;
  double norm_a2 = 0.0;
  double norm_b2 = 0.0;
  cplx overlap{};
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double w = (i == 0 || i + 1 == a.values.size()) ? 0.5 : 1.0;
    diff2 += w * std::norm(a.values[i] - b.values[i]);
    norm_a2 += w * std::norm(a.values[i]);
    norm_b2 += w * std::norm(b.values[i]);
    overlap += w * std::conj(b.values[i]) * a.values[i];
  }
  L2Distance out;
  out.plain = std::sqrt(diff2 * dx);
  const double aligned2 =
      (norm_a2 + norm_b2 - 2.0 * std::abs(overlap)) * dx;
  out.phase_aligned = std::sqrt(std::max(0.0, aligned2));
  return out;
}

double schrodinger_residual(const PropagatorKernel& kernel,
                            const PotentialModel& model, double x,
                            double x_prime, cplx t, double h, double dt,
                            const UnitsConfig& units) {
  if (!(h > 0.0) || !(dt > 0.0)) {
    throw ValidationError("schrodinger_residual: h and dt must be positive");
  }
  const cplx center = kernel(x, x_prime, t);
  const cplx d2x =
      (kernel(x + h, x_prime, t) - 2.0 * center + kernel(x - h, x_prime, t)) /
      (h * h);
  const cplx ddt =
      (kernel(x, x_prime, t + dt) - kernel(x, x_prime, t - dt)) / (2.0 * dt);
  const double v = potential_value(model, x, units);
  const double hbar = units.hbar;
  const cplx defect = -(hbar * hbar / (2.0 * units.mass)) * d2x + v * center -
                      cplx(0.0, 1.0) * hbar * ddt;
  return std::abs(defect);
}

std::vector<double> delta_limit_check(const PropagatorKernel& kernel,
                                      const std::function<double(double)>& f,
                                      double x,
                                      const std::vector<double>& tau_list) {
  if (tau_list.empty()) {
    throw ValidationError("delta_limit_check: tau_list must be non-empty");
  }
  for (std::size_t k = 0; k < tau_list.size(); ++k) {
    if (!(tau_list[k] > 0.0)) {
      throw ValidationError("delta_limit_check: tau values must be positive");
    }
    if (k > 0 && !(tau_list[k] < tau_list[k - 1])) {
      throw ValidationError(
          "delta_limit_check: tau_list must be strictly decreasing");
    }
  }

  // Window wide enough for both the test function's support and the widest
  // kernel; spacing fine enough to resolve the narrowest kernel in the list.
  const double half_window = 14.0;
  const int n = 5601;
  const double dx = 2.0 * half_window / static_cast<double>(n - 1);

  std::vector<double> errors;
  errors.reserve(tau_list.size());
  for (const double tau : tau_list) {
    const cplx t{0.0, -tau};
    cplx acc{};
    for (int j = 0; j < n; ++j) {
      const double xp = x - half_window + dx * static_cast<double>(j);
      const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
      acc += w * kernel(x, xp, t) * f(xp);
    }
    errors.push_back(std::abs(acc * dx - f(x)));
  }
  for (std::size_t k = 1; k < errors.size(); ++k) {
    if (errors[k] > 1.05 * errors[k - 1] + 1e-12) {
      throw NumericalError(
          "delta_limit_check: error sequence fails to decrease with tau; the "
          "kernel does not concentrate to a point mass");
    }
  }
  return errors;
}

}  // namespace greenprop

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <vector>

#include "greenprop/greens.hpp"
#include "greenprop/specfun.hpp"

namespace greenprop {

namespace {

// Local wavenumber k(x) = sqrt(2 m (E - V)) / hbar, Im k >= 0.
cplx local_wavenumber(cplx energy, double v, const UnitsConfig& units) {
  cplx k = std::sqrt(2.0 * units.mass * (energy - v)) / units.hbar;
  if (k.imag() < 0.0) k = -k;
  return k;
}

// Values of one solution stored on a uniform grid, interpolated by quintic
// cells that match u, u' from the integrator and u'' = q u from the equation
// at both cell ends.
struct InterpolatedSolution {
  double x0 = 0.0;
  double h = 0.0;
  std::vector<cplx> u;
  std::vector<cplx> du;
  std::vector<cplx> ddu;

  int cell(double x) const {
    const int n = static_cast<int>(u.size());
    const double span = h * (n - 1);
    if (x < x0 - 1e-12 * std::abs(span) - 1e-300 ||
        x > x0 + span * (1.0 + 1e-12) + 1e-300) {
      throw ValidationError(
          "mode evaluation outside the integration domain");
    }
    const int i = static_cast<int>(std::floor((x - x0) / h));
    return std::clamp(i, 0, n - 2);
  }

  cplx value(double x) const {
    const int i = cell(x);
    const double t = (x - (x0 + i * h)) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    const double k0 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double k1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double k2 = 0.5 * (t3 - 2.0 * t4 + t5);
    return u[i] * h0 + h * du[i] * h1 + h * h * ddu[i] * h2 +
           u[i + 1] * k0 + h * du[i + 1] * k1 + h * h * ddu[i + 1] * k2;
  }

  cplx derivative(double x) const {
    const int i = cell(x);
    const double t = (x - (x0 + i * h)) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
    const double dh0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
    const double dh1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
    const double dh2 = 0.5 * (2.0 * t - 9.0 * t2 + 12.0 * t3 - 5.0 * t4);
    const double dk0 = 30.0 * t2 - 60.0 * t3 + 30.0 * t4;
    const double dk1 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
    const double dk2 = 0.5 * (3.0 * t2 - 8.0 * t3 + 5.0 * t4);
    return u[i] * (dh0 / h) + du[i] * dh1 + h * ddu[i] * dh2 +
           u[i + 1] * (dk0 / h) + du[i + 1] * dk1 + h * ddu[i + 1] * dk2;
  }
};

using OdeState = std::array<double, 4>;  // {Re u, Im u, Re u', Im u'}

// Integrate u'' = q(x) u inward from one domain end, storing (u, u') at the
// n_points uniform nodes. forward = true integrates left-to-right.
InterpolatedSolution integrate_mode(const PotentialModel& model, cplx energy,
                                    const UnitsConfig& units, double x_lo,
                                    double x_hi, int n_points, bool forward) {
  namespace ode = boost::numeric::odeint;
  const double h = (x_hi - x_lo) / (n_points - 1);
  const double m = units.mass;
  const double hbar = units.hbar;
  const cplx two_m_over_h2(2.0 * m / (hbar * hbar), 0.0);

  auto system = [&](const OdeState& s, OdeState& ds, double x) {
    const cplx u(s[0], s[1]);
    // Stepper round-off can place a stage abscissa half an ulp past the
    // domain end; clamping keeps a custom table's range check happy there.
    const double xc = std::clamp(x, x_lo, x_hi);
    const cplx q = two_m_over_h2 * (potential_value(model, xc, units) - energy);
    const cplx ddu = q * u;
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = ddu.real();
    ds[3] = ddu.imag();
  };

  // First-order WKB seed: u'/u = sigma i k - k'/(2k) at the starting end,
  // sigma chosen so the solution decays towards the nearer infinity.
  const double x_start = forward ? x_lo : x_hi;
  const double sigma = forward ? -1.0 : 1.0;
  const cplx k = local_wavenumber(energy, potential_value(model, x_start, units),
                                  units);
  if (std::abs(k) < 1e-9) {
    throw NumericalError(
        "mode integration seeded at a classical turning point; enlarge the "
        "domain or shift the energy off the real axis");
  }
  const double dv = potential_derivative(model, x_start, units);
  const cplx dk = -m * dv / (hbar * hbar * k);
  const cplx ratio = sigma * cplx(0.0, 1.0) * k - dk / (2.0 * k);

  OdeState state = {1.0, 0.0, ratio.real(), ratio.imag()};

  InterpolatedSolution sol;
  sol.x0 = x_lo;
  sol.h = h;
  sol.u.reserve(n_points);
  sol.du.reserve(n_points);

  auto observer = [&](const OdeState& s, double /*x*/) {
    sol.u.emplace_back(s[0], s[1]);
    sol.du.emplace_back(s[2], s[3]);
  };

  auto stepper = ode::make_controlled(1e-12, 1e-12,
                                      ode::runge_kutta_fehlberg78<OdeState>());
  if (forward) {
    ode::integrate_const(stepper, system, state, x_lo, x_hi + 0.5 * h, h,
                         observer);
  } else {
    ode::integrate_const(stepper, system, state, x_hi, x_lo - 0.5 * h, -h,
                         observer);
    std::reverse(sol.u.begin(), sol.u.end());
    std::reverse(sol.du.begin(), sol.du.end());
  }
  if (static_cast<int>(sol.u.size()) != n_points) {
    throw NumericalError("mode integration produced an unexpected node count");
  }
  for (const cplx v : sol.u) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalError(
          "mode integration overflowed; the domain is too deep into the "
          "forbidden region for this energy");
    }
  }

  sol.ddu.resize(n_points);
  for (int i = 0; i < n_points; ++i) {
    const double x = std::clamp(x_lo + i * h, x_lo, x_hi);
    const cplx q = two_m_over_h2 * (potential_value(model, x, units) - energy);
    sol.ddu[i] = q * sol.u[i];
  }
  return sol;
}

}  // namespace

ModePair make_free_modes(cplx energy, const UnitsConfig& units) {
  const cplx k = wavenumber(energy, units);
  if (std::abs(k) == 0.0) {
    throw NumericalError("free modes are degenerate at zero energy");
  }
  const cplx ik(0.0, 1.0);
  ModePair pair;
  pair.u_minus = [k, ik](double x) { return std::exp(-ik * k * x); };
  pair.u_plus = [k, ik](double x) { return std::exp(ik * k * x); };
  pair.du_minus = [k, ik](double x) { return -ik * k * std::exp(-ik * k * x); };
  pair.du_plus = [k, ik](double x) { return ik * k * std::exp(ik * k * x); };
  pair.wronskian = 2.0 * ik * k;
  pair.energy = energy;
  pair.convention_note =
      "u-(x) = exp(-i k x), u+(x) = exp(+i k x), W = 2 i k, Im k >= 0";
  return pair;
}

ModePair make_harmonic_modes(cplx energy, double omega,
                             const UnitsConfig& units) {
  if (omega <= 0.0) {
    throw ValidationError("harmonic modes require omega > 0");
  }
  const double s = std::sqrt(2.0 * units.mass * omega / units.hbar);
  const cplx p = energy / (units.hbar * omega) - 0.5;

  ModePair pair;
  pair.u_minus = [p, s](double x) {
    return parabolic_cylinder_d(p, -s * x).value;
  };
  pair.u_plus = [p, s](double x) {
    return parabolic_cylinder_d(p, s * x).value;
  };
  pair.du_minus = [p, s](double x) {
    return -s * parabolic_cylinder_d_deriv(p, -s * x).value;
  };
  pair.du_plus = [p, s](double x) {
    return s * parabolic_cylinder_d_deriv(p, s * x).value;
  };
  // Constant by Abel's identity; the closed value follows from the values of
  // D_p and D_p' at z = 0 plus the Legendre duplication of Gamma.
  const cplx sqrt_2pi(2.5066282746310005024, 0.0);
  pair.wronskian = -s * sqrt_2pi * (1.0 / gamma_complex(-p).value);
  pair.energy = energy;
  pair.convention_note =
      "u-(x) = D_p(-z), u+(x) = D_p(z), z = sqrt(2 m omega/hbar) x, "
      "W = -sqrt(2 pi) sqrt(2 m omega/hbar) / Gamma(-p)";
  return pair;
}

ModePair solve_custom_modes(const PotentialModel& model, cplx energy,
                            const UnitsConfig& units, int n_points) {
  if (model.kind() == PotentialModel::Kind::Delta) {
    throw ValidationError(
        "numerical mode integration does not support point interactions; "
        "the kink at the origin is not resolvable by a smooth integrator");
  }
  if (n_points < 16) {
    throw ValidationError("mode integration needs at least 16 grid points");
  }

  double x_lo = -10.0;
  double x_hi = 10.0;
  if (model.kind() == PotentialModel::Kind::Custom) {
    x_lo = model.custom_x_min();
    x_hi = model.custom_x_max();
  }

  auto um = std::make_shared<InterpolatedSolution>(
      integrate_mode(model, energy, units, x_lo, x_hi, n_points, true));
  auto up = std::make_shared<InterpolatedSolution>(
      integrate_mode(model, energy, units, x_lo, x_hi, n_points, false));

  // The Wronskian of exact solutions is constant; its spread across probe
  // nodes measures the integration error.
  std::vector<cplx> probes;
  for (const double frac : {0.15, 0.27, 0.39, 0.5, 0.62, 0.74, 0.86}) {
    const int i = static_cast<int>(frac * (n_points - 1));
    probes.push_back(um->u[i] * up->du[i] - up->u[i] * um->du[i]);
  }
  cplx mean(0.0, 0.0);
  for (const cplx w : probes) mean += w;
  mean /= static_cast<double>(probes.size());
  double drift = 0.0;
  for (const cplx w : probes) {
    drift = std::max(drift, std::abs(w - mean));
  }
  if (std::abs(mean) == 0.0 || drift / std::abs(mean) > 1e-6) {
    throw NumericalError(
        "wronskian drift across the domain exceeds 1e-6; the two solutions "
        "are not resolved independently at this energy");
  }

  ModePair pair;
  pair.u_minus = [um](double x) { return um->value(x); };
  pair.du_minus = [um](double x) { return um->derivative(x); };
  pair.u_plus = [up](double x) { return up->value(x); };
  pair.du_plus = [up](double x) { return up->derivative(x); };
  pair.wronskian = mean;
  pair.energy = energy;
  pair.convention_note =
      "numerically integrated modes, WKB-seeded at the domain ends and "
      "integrated inward; quintic cell interpolation between nodes";
  return pair;
}

}  // namespace greenprop

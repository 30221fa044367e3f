#include "greenprop/greens.hpp"

#include <algorithm>
#include <cmath>

#include "greenprop/specfun.hpp"

namespace greenprop {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kEps = 2.220446049250313e-16;

// Shared guard: an energy whose oscillator order is within this distance of
// a non-negative integer sits on top of a bound-state pole.
constexpr double kPoleGuard = 1e-3;

double nonneg_integer_distance(cplx p) {
  const double r = std::round(p.real());
  if (r < -0.5) return std::abs(p - cplx(0.0, 0.0));  // nearest pole is p = 0
  return std::hypot(p.real() - r, p.imag());
}

}  // namespace

std::string to_string(GreenMethod method) {
  switch (method) {
    case GreenMethod::closed_free: return "closed_free";
    case GreenMethod::closed_harmonic: return "closed_harmonic";
    case GreenMethod::delta_dressed: return "delta_dressed";
    case GreenMethod::numerical_modes: return "numerical_modes";
  }
  return "unknown";
}

cplx wavenumber(cplx energy, const UnitsConfig& units) {
  cplx k = std::sqrt(2.0 * units.mass * energy) / units.hbar;
  if (k.imag() < 0.0) k = -k;
  return k;
}

cplx wronskian(const ModePair& pair, const std::vector<double>& probes) {
  if (probes.empty()) {
    throw ValidationError("wronskian check requires at least one probe");
  }
  std::vector<cplx> values;
  values.reserve(probes.size());
  for (const double x : probes) {
    values.push_back(pair.u_minus(x) * pair.du_plus(x) -
                     pair.u_plus(x) * pair.du_minus(x));
  }
  cplx mean(0.0, 0.0);
  for (const cplx w : values) mean += w;
  mean /= static_cast<double>(values.size());
  if (std::abs(mean) == 0.0) {
    throw NumericalError("wronskian vanished at all probes: degenerate pair");
  }
  double drift = 0.0;
  for (const cplx w : values) drift = std::max(drift, std::abs(w - mean));
  if (drift / std::abs(mean) > 1e-6) {
    throw NumericalError(
        "wronskian is not constant across the probes (relative drift above "
        "1e-6)");
  }
  return mean;
}

GreenEval assemble_green(const ModePair& pair, const EvalPoint& point,
                         const UnitsConfig& units, GreenMethod method) {
  const double x_lo = std::min(point.x, point.x_prime);
  const double x_hi = std::max(point.x, point.x_prime);

  cplx w = pair.wronskian;
  if (std::abs(w) == 0.0) {
    w = pair.u_minus(x_hi) * pair.du_plus(x_hi) -
        pair.u_plus(x_hi) * pair.du_minus(x_hi);
  }
  if (std::abs(w) == 0.0) {
    throw NumericalError("cannot assemble kernel: vanishing wronskian");
  }

  // Local counter-check of the stored constant.
  const cplx w_local = pair.u_minus(x_hi) * pair.du_plus(x_hi) -
                       pair.u_plus(x_hi) * pair.du_minus(x_hi);
  const double drift = std::abs(w_local - w) / std::abs(w);

  GreenEval eval;
  eval.point = point;
  eval.point.param = pair.energy;
  eval.method = method;
  eval.value = -(2.0 * units.mass / units.hbar) * pair.u_minus(x_lo) *
               pair.u_plus(x_hi) / w;
  eval.est_error = std::abs(eval.value) * (drift + 16.0 * kEps);
  return eval;
}

GreenEval green_free(const EvalPoint& point, cplx energy,
                     const UnitsConfig& units) {
  const cplx k = wavenumber(energy, units);
  if (std::abs(k) < 1e-300) {
    throw NumericalError("free kernel is singular at zero energy");
  }
  const cplx i_unit(0.0, 1.0);
  const double dist = std::abs(point.x - point.x_prime);

  GreenEval eval;
  eval.point = point;
  eval.point.param = energy;
  eval.method = GreenMethod::closed_free;
  eval.value = i_unit * units.mass / (units.hbar * k) *
               std::exp(i_unit * k * dist);
  eval.est_error = 16.0 * kEps * std::abs(eval.value);
  return eval;
}

GreenEval green_harmonic(const EvalPoint& point, cplx energy, double omega,
                         const UnitsConfig& units) {
  if (omega <= 0.0) {
    throw ValidationError("harmonic kernel requires omega > 0");
  }
  const cplx p = energy / (units.hbar * omega) - 0.5;
  if (nonneg_integer_distance(p) < kPoleGuard) {
    throw NumericalError(
        "energy lies within 1e-3 (in units of hbar omega) of a bound state; "
        "the kernel is essentially singular there");
  }

  const double s = std::sqrt(2.0 * units.mass * omega / units.hbar);
  const double z_hi = s * std::max(point.x, point.x_prime);
  const double z_lo = s * std::min(point.x, point.x_prime);

  const SpecFunResult g = gamma_complex(-p);
  const SpecFunResult d_hi = parabolic_cylinder_d(p, z_hi);
  const SpecFunResult d_lo = parabolic_cylinder_d(p, -z_lo);
  const double prefactor =
      std::sqrt(units.mass / (kPi * units.hbar * omega));

  GreenEval eval;
  eval.point = point;
  eval.point.param = energy;
  eval.method = GreenMethod::closed_harmonic;
  eval.value = prefactor * g.value * d_hi.value * d_lo.value;

  const double rel_g = g.est_error / std::max(std::abs(g.value), 1e-300);
  const double rel_hi = d_hi.est_error / std::max(std::abs(d_hi.value), 1e-300);
  const double rel_lo = d_lo.est_error / std::max(std::abs(d_lo.value), 1e-300);
  eval.est_error = std::abs(eval.value) * (rel_g + rel_hi + rel_lo + 8.0 * kEps);
  return eval;
}

GreenEval green_delta_dress(const PotentialModel& model, const EvalPoint& point,
                            cplx energy, const UnitsConfig& units) {
  if (model.kind() != PotentialModel::Kind::Delta) {
    throw ValidationError("delta dressing requires a point-interaction model");
  }
  const double b = model.delta_strength();
  const PotentialModel& bg = model.background();

  auto bare = [&](double x, double x_prime) -> GreenEval {
    EvalPoint q{x, x_prime, energy};
    switch (bg.kind()) {
      case PotentialModel::Kind::Free:
        return green_free(q, energy, units);
      case PotentialModel::Kind::Harmonic:
        return green_harmonic(q, energy, bg.omega(), units);
      default:
        throw ValidationError(
            "delta dressing supports free or harmonic backgrounds only");
    }
  };

  const GreenEval g_xx = bare(point.x, point.x_prime);
  const GreenEval g_x0 = bare(point.x, 0.0);
  const GreenEval g_0x = bare(0.0, point.x_prime);
  const GreenEval g_00 = bare(0.0, 0.0);

  const double coupling = b / units.hbar;
  const cplx denom = 1.0 + coupling * g_00.value;
  if (std::abs(denom) < 1e-10) {
    throw NumericalError(
        "energy sits on a bound state of the dressed kernel (the dressing "
        "denominator vanishes)");
  }

  GreenEval eval;
  eval.point = point;
  eval.point.param = energy;
  eval.method = GreenMethod::delta_dressed;
  eval.value = g_xx.value -
               coupling * g_x0.value * g_0x.value / denom;

  const double correction =
      std::abs(coupling * g_x0.value * g_0x.value / denom);
  eval.est_error = g_xx.est_error +
                   correction * (g_x0.est_error / std::max(std::abs(g_x0.value), 1e-300) +
                                 g_0x.est_error / std::max(std::abs(g_0x.value), 1e-300) +
                                 g_00.est_error / std::abs(denom)) +
                   8.0 * kEps * std::abs(eval.value);
  return eval;
}

double jump_residual(const std::function<cplx(double)>& g_of_x, double x_prime,
                     const UnitsConfig& units, double h) {
  if (h <= 0.0) {
    throw ValidationError("jump stencil step must be positive");
  }
  const cplx g0 = g_of_x(x_prime);

  auto one_sided_jump = [&](double step) -> cplx {
    // Second-order three-point stencils approaching from the right and left.
    const cplx d_right =
        (-3.0 * g0 + 4.0 * g_of_x(x_prime + step) - g_of_x(x_prime + 2.0 * step)) /
        (2.0 * step);
    const cplx d_left =
        (3.0 * g0 - 4.0 * g_of_x(x_prime - step) + g_of_x(x_prime - 2.0 * step)) /
        (2.0 * step);
    return d_right - d_left;
  };

  const cplx jump_h = one_sided_jump(h);
  const cplx jump_h2 = one_sided_jump(0.5 * h);
  const cplx jump = (4.0 * jump_h2 - jump_h) / 3.0;

  const double target = 2.0 * units.mass / units.hbar;
  return std::abs(jump - cplx(-target, 0.0)) / target;
}

GreenEval evaluate_green(const PotentialModel& model, const EvalPoint& point,
                         cplx energy, const UnitsConfig& units,
                         bool force_numerical) {
  if (force_numerical || model.kind() == PotentialModel::Kind::Custom) {
    const ModePair pair = solve_custom_modes(model, energy, units);
    return assemble_green(pair, point, units, GreenMethod::numerical_modes);
  }
  switch (model.kind()) {
    case PotentialModel::Kind::Free:
      return green_free(point, energy, units);
    case PotentialModel::Kind::Harmonic:
      return green_harmonic(point, energy, model.omega(), units);
    case PotentialModel::Kind::Delta:
      return green_delta_dress(model, point, energy, units);
    default:
      throw ValidationError("unsupported potential kind");
  }
}

}  // namespace greenprop

#include "greenprop/propagator.hpp"

#include <cmath>
#include <complex>
#include <string>

#include "greenprop/specfun.hpp"

namespace greenprop {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kEps = 2.220446049250313e-16;
constexpr double kCausticGuard = 1e-10;
constexpr int kMaxTerms = 500;  // matches the Hermite recurrence ceiling
const cplx kImag(0.0, 1.0);

bool finite(cplx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

void require_time(cplx t, const char* who) {
  if (t == cplx(0.0, 0.0)) {
    throw ValidationError(
        std::string(who) +
        ": t = 0 is the singular initial time (the kernel is a delta "
        "distribution there; probe the limit with delta_limit_check)");
  }
  if (t.imag() > 0.0) {
    throw ValidationError(std::string(who) +
                          ": Im t must be <= 0 (real or damped time)");
  }
}

}  // namespace

std::string to_string(PropagatorMethod method) {
  switch (method) {
    case PropagatorMethod::closed_free:
      return "closed_free";
    case PropagatorMethod::closed_delta:
      return "closed_delta";
    case PropagatorMethod::closed_harmonic:
      return "closed_harmonic";
    case PropagatorMethod::spectral_sum:
      return "spectral_sum";
    case PropagatorMethod::inverse_laplace:
      return "inverse_laplace";
  }
  return "unknown";
}

PropagatorEval propagator_free(double x, double x_prime, cplx t,
                               const UnitsConfig& units) {
  require_time(t, "propagator_free");
  const double dx = x - x_prime;
  const cplx phase =
      units.mass * dx * dx / (2.0 * units.hbar * t);  // multiplies i
  const cplx amp =
      std::sqrt(units.mass / (2.0 * kPi * kImag * units.hbar * t));
  const cplx value = amp * std::exp(kImag * phase);
  if (!finite(value)) {
    throw NumericalError("propagator_free: kernel overflowed at |t| = " +
                         std::to_string(std::abs(t)));
  }
  const double est = std::abs(value) * kEps * (4.0 + std::abs(phase));
  return {EvalPoint{x, x_prime, t}, value, PropagatorMethod::closed_free, 0,
          est};
}

PropagatorEval propagator_delta(double x, double x_prime, cplx t, double b,
                                const UnitsConfig& units) {
  require_time(t, "propagator_delta");
  if (b <= 0.0) {
    throw ValidationError(
        "propagator_delta: coupling b must be positive (repulsive point "
        "interaction)");
  }
  const PropagatorEval base = propagator_free(x, x_prime, t, units);
  const double m = units.mass;
  const double hbar = units.hbar;
  const double dsum = std::abs(x) + std::abs(x_prime);

  // Scaled-complement form of the interaction term: the naked erfc closed
  // form multiplies a growing exponential by a decaying erfc; folding the
  // exponential into erfcx removes the overflow for all Im t <= 0.
  const cplx root = std::sqrt(m / (2.0 * kImag * hbar * t));
  const cplx zeta = root * (dsum + kImag * b * t / hbar);
  const SpecFunResult scaled = erfcx_complex(zeta);
  const cplx phase = m * dsum * dsum / (2.0 * hbar * t);  // multiplies i
  const cplx envelope = std::exp(kImag * phase);
  const double pref = m * b / (2.0 * hbar * hbar);
  const cplx correction = -pref * envelope * scaled.value;

  const cplx value = base.value + correction;
  if (!finite(value)) {
    throw NumericalError("propagator_delta: interaction term overflowed");
  }
  const double est =
      base.est_error +
      pref * std::abs(envelope) *
          (scaled.est_error +
           std::abs(scaled.value) * kEps * (4.0 + std::abs(phase)));
  return {EvalPoint{x, x_prime, t}, value, PropagatorMethod::closed_delta, 0,
          est};
}

PropagatorEval propagator_harmonic(double x, double x_prime, cplx t,
                                   double omega, const UnitsConfig& units) {
  if (omega <= 0.0) {
    throw ValidationError("propagator_harmonic: omega must be positive");
  }
  require_time(t, "propagator_harmonic");

  const cplx wt = omega * t;
  const cplx sin_wt = std::sin(wt);
  if (std::abs(sin_wt) < kCausticGuard) {
    throw NumericalError(
        "propagator_harmonic: |sin(w t)| < 1e-10 — caustic time, the kernel "
        "degenerates to a distribution");
  }

  const double m = units.mass;
  const double hbar = units.hbar;
  const double scale = std::sqrt(m * omega / hbar);
  const double y = scale * x;
  const double yp = scale * x_prime;

  // rho = e^{-i w t} has |rho| <= 1 here, so Re(1 - rho^2) >= 0 and the
  // principal square root of (1 - rho^2) is continuous in t; together with
  // the explicit half-phase e^{-i w t / 2} this reproduces
  // sqrt(m w / (2 pi i hbar sin(w t))) with the branch continued from the
  // Euclidean axis (the quarter-period caustic phases emerge automatically).
  const cplx rho = std::exp(-kImag * wt);
  const cplx rho2 = rho * rho;
  const cplx expo =
      (2.0 * y * yp * rho - 0.5 * (y * y + yp * yp) * (1.0 + rho2)) /
      (1.0 - rho2);
  const cplx prefactor = std::sqrt(m * omega / (kPi * hbar)) *
                         std::exp(-kImag * wt * 0.5) / std::sqrt(1.0 - rho2);
  const cplx value = prefactor * std::exp(expo);
  if (!finite(value)) {
    throw NumericalError("propagator_harmonic: kernel overflowed");
  }
  const double est =
      std::abs(value) * kEps *
      (6.0 + std::abs(expo) + 1.0 / std::abs(sin_wt));
  return {EvalPoint{x, x_prime, t}, value, PropagatorMethod::closed_harmonic,
          0, est};
}

double residue_weights(int n) {
  if (n < 0 || n > kMaxTerms) {
    throw ValidationError("residue_weights: n must lie in [0, 500], got " +
                          std::to_string(n));
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  if (n <= 170) {
    return sign / std::tgamma(n + 1.0);  // exact factorial range for double
  }
  // 1/n! underflows past n ~ 178; the log form returns the representable
  // part (or a signed zero) instead of tripping tgamma overflow.
  return sign * std::exp(-std::lgamma(n + 1.0));
}

PropagatorEval spectral_sum_harmonic(double x, double x_prime, cplx t,
                                     double omega, const UnitsConfig& units,
                                     const SpectralSumConfig& cfg) {
  if (omega <= 0.0) {
    throw ValidationError("spectral_sum_harmonic: omega must be positive");
  }
  if (cfg.n_max < 0 || cfg.n_max > kMaxTerms) {
    throw ValidationError(
        "spectral_sum_harmonic: n_max must lie in [0, 500], got " +
        std::to_string(cfg.n_max));
  }
  if (cfg.damping < 0.0) {
    throw ValidationError("spectral_sum_harmonic: damping must be >= 0");
  }

  const cplx t_damped = t - kImag * cfg.damping;
  const cplx ratio = std::exp(-kImag * omega * t_damped);
  if (std::abs(ratio) >= 1.0) {
    throw ConvergenceError(
        "spectral_sum_harmonic: |e^{-i w t}| >= 1 at the requested time — "
        "the residue series is only Abel-summable there; use Im t < 0 or a "
        "positive damping");
  }

  const double m = units.mass;
  const double hbar = units.hbar;
  const double scale = std::sqrt(m * omega / hbar);
  const double y = scale * x;
  const double yp = scale * x_prime;

  // Normalized-Hermite three-term recurrence; htilde_n stays O(1) inside the
  // classical region, so no factorial overflow at any n_max <= 500.
  double prev_y = 0.0;
  double prev_yp = 0.0;
  double cur_y = 1.0;
  double cur_yp = 1.0;
  cplx level_phase = std::exp(-kImag * omega * t_damped * 0.5);
  cplx sum(0.0, 0.0);
  cplx term(0.0, 0.0);
  for (int n = 0; n <= cfg.n_max; ++n) {
    term = cur_y * cur_yp * level_phase;
    sum += term;
    const double next_y = y * std::sqrt(2.0 / (n + 1.0)) * cur_y -
                          std::sqrt(n / (n + 1.0)) * prev_y;
    const double next_yp = yp * std::sqrt(2.0 / (n + 1.0)) * cur_yp -
                           std::sqrt(n / (n + 1.0)) * prev_yp;
    prev_y = cur_y;
    cur_y = next_y;
    prev_yp = cur_yp;
    cur_yp = next_yp;
    level_phase *= ratio;
  }

  const double envelope = std::exp(-0.5 * (y * y + yp * yp));
  const double pref = std::sqrt(m * omega / (kPi * hbar));
  const cplx value = pref * envelope * sum;
  if (!finite(value)) {
    throw NumericalError(
        "spectral_sum_harmonic: series overflowed (argument far outside the "
        "classical region of level n_max)");
  }
  const double est = pref * envelope * std::abs(term);
  return {EvalPoint{x, x_prime, t}, value, PropagatorMethod::spectral_sum,
          cfg.n_max + 1, est};
}

cplx mehler_sum(double z, double z_prime, cplx xi, int n_max) {
  if (std::abs(xi) >= 0.5) {
    throw ValidationError(
        "mehler_sum: |xi| must be < 1/2 (the bilinear series diverges "
        "outside that disc)");
  }
  if (n_max < 0 || n_max > kMaxTerms) {
    throw ValidationError("mehler_sum: n_max must lie in [0, 500], got " +
                          std::to_string(n_max));
  }
  // H_n(z) H_n(z') xi^n / n! == htilde_n(z) htilde_n(z') (2 xi)^n keeps
  // every factor bounded (plain H_n overflows near n = 150).
  const cplx q = 2.0 * xi;
  double prev_z = 0.0;
  double prev_zp = 0.0;
  double cur_z = 1.0;
  double cur_zp = 1.0;
  cplx power(1.0, 0.0);
  cplx sum(0.0, 0.0);
  for (int n = 0; n <= n_max; ++n) {
    sum += cur_z * cur_zp * power;
    const double next_z = z * std::sqrt(2.0 / (n + 1.0)) * cur_z -
                          std::sqrt(n / (n + 1.0)) * prev_z;
    const double next_zp = z_prime * std::sqrt(2.0 / (n + 1.0)) * cur_zp -
                           std::sqrt(n / (n + 1.0)) * prev_zp;
    prev_z = cur_z;
    cur_z = next_z;
    prev_zp = cur_zp;
    cur_zp = next_zp;
    power *= q;
  }
  return sum;
}

cplx mehler_closed(double z, double z_prime, cplx xi) {
  if (std::abs(xi) >= 0.5) {
    throw ValidationError(
        "mehler_closed: |xi| must be < 1/2 (outside the identity's disc)");
  }
  // |4 xi^2| < 1 keeps 1 - 4 xi^2 in the right half-plane: principal branch
  // matches the series (value 1 at xi = 0).
  const cplx denom = 1.0 - 4.0 * xi * xi;
  const cplx expo =
      (4.0 * xi * z * z_prime - 4.0 * xi * xi * (z * z + z_prime * z_prime)) /
      denom;
  return std::exp(expo) / std::sqrt(denom);
}

}  // namespace greenprop

#include "greenprop/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace greenprop {

namespace {

constexpr double kPi = 3.14159265358979323846;
const cplx kImagUnit{0.0, 1.0};

bool finite(cplx v) {
  return std::isfinite(v.real()) && std::isfinite(v.imag());
}

// Compensated accumulator: keeps the trapezoid sums independent of node
// ordering and immune to cancellation between the long oscillatory tails.
class KahanSum {
 public:
  void add(cplx term) {
    add_part(term.real(), re_, re_comp_);
    add_part(term.imag(), im_, im_comp_);
  }
  cplx value() const { return {re_, im_}; }

 private:
  static void add_part(double term, double& sum, double& comp) {
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double re_ = 0.0;
  double im_ = 0.0;
  double re_comp_ = 0.0;
  double im_comp_ = 0.0;
};

}  // namespace

PropagatorEval bromwich_quadrature(const GreenEvaluator& green, cplx t,
                                   const ContourSpec& spec,
                                   const UnitsConfig& units, double x,
                                   double x_prime) {
  if (spec.scheme != ContourScheme::trapezoid_line) {
    throw ValidationError(
        "bromwich_quadrature: spec.scheme must be trapezoid_line; use "
        "talbot_invert or k_line_quadrature for the other schemes");
  }
  if (!(spec.offset_c > 0.0)) {
    throw ValidationError("bromwich_quadrature: offset_c must be positive");
  }
  if (spec.half_width < 0.0) {
    throw ValidationError(
        "bromwich_quadrature: half_width must be positive, or 0 for "
        "automatic truncation");
  }
  if (spec.n_nodes < 16 || spec.n_nodes % 2 != 0) {
    throw ValidationError(
        "bromwich_quadrature: n_nodes must be even and at least 16");
  }
  if (spec.rel_tol < 0.0) {
    throw ValidationError(
        "bromwich_quadrature: rel_tol must be non-negative (0 disables "
        "refinement)");
  }
  if (!(t.imag() < 0.0)) {
    throw ValidationError(
        "bromwich_quadrature: Im t must be strictly negative; the damping is "
        "what makes the contour arms integrable (use k_line_quadrature or "
        "the closed forms otherwise)");
  }

  const double hbar = units.hbar;
  const double offset = hbar * spec.offset_c;  // arm height, energy units
  const double damping = -t.imag();

  // Smoothed fold around the spectrum: flat lower arm at Im E = -offset,
  // analytic U-turn through Re E = -4*offset, flat upper arm at +offset.
  // Corner-free, so the trapezoid rule along the parameter v is spectrally
  // accurate (analyticity strip half-width ~ offset in v).
  const double turn = 2.0 * offset;
  // Vertex depth below the spectrum bottom: enough to keep the turn away
  // from the E = 0 branch point, but shrinking with strong damping, because
  // exp(-i E t / hbar) grows like exp(depth * damping / hbar) left of zero
  // and would otherwise amplify roundoff by e^{4 C tau / hbar}.
  const double depth =
      std::min(4.0 * offset, offset + 3.0 * hbar / damping);
  const double vertex_shift = turn + depth;
  auto contour = [&](double v, cplx& derivative) {
    const double root = std::sqrt(v * v + turn * turn);
    derivative = cplx(v / root, offset * turn * turn / (root * root * root));
    return cplx(root - vertex_shift, offset * v / root);
  };

  // Auto-truncation: far out on the arms the integrand magnitude is
  // ~ exp((offset*|Re t| - Re E * damping)/hbar), so this reach pushes the
  // truncated ends below ~1e-15 of the fold peak.
  const double v_max =
      spec.half_width > 0.0
          ? spec.half_width
          : vertex_shift + turn +
                (34.0 * hbar + offset * std::abs(t.real())) / damping +
                6.0 * offset;

  double peak = 0.0;
  auto integrand = [&](double v) {
    cplx derivative;
    const cplx energy = contour(v, derivative);
    const cplx val =
        std::exp(-kImagUnit * energy * t / hbar) * green(energy) * derivative;
    if (!finite(val)) {
      throw NumericalError(
          "bromwich_quadrature: integrand evaluated to a non-finite value on "
          "the contour");
    }
    peak = std::max(peak, std::abs(val));
    return val;
  };

  auto sweep = [&](int nodes) {
    const double h = 2.0 * v_max / nodes;
    KahanSum acc;
    for (int i = 0; i <= nodes; ++i) {
      const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
      acc.add(w * integrand(-v_max + h * static_cast<double>(i)));
    }
    return acc.value() * h / (2.0 * kPi * kImagUnit * hbar);
  };

  int n = spec.n_nodes;
  cplx value = sweep(n);

  const double tail =
      std::max(std::abs(integrand(v_max)), std::abs(integrand(-v_max)));
  if (tail > 1e-3 * peak) {
    throw ConvergenceError(
        "bromwich_quadrature: integrand at the truncated arm ends exceeds "
        "1e-3 of the contour peak; widen half_width or increase |Im t|");
  }

  double est = std::abs(value - sweep(n / 2));
  if (spec.rel_tol > 0.0) {
    for (int pass = 0; pass < 14; ++pass) {
      if (est <= spec.rel_tol * (std::abs(value) + 1e-30)) {
        break;
      }
      const cplx refined = sweep(2 * n);
      est = std::abs(refined - value);
      value = refined;
      n *= 2;
    }
  }

  PropagatorEval out;
  out.point = EvalPoint{x, x_prime, t};
  out.value = value;
  out.method = PropagatorMethod::inverse_laplace;
  out.terms_used = n;
  out.est_error = est;
  return out;
}

PropagatorEval k_line_quadrature(double x, double x_prime, cplx t,
                                 KLineIntegrand kind, double b,
                                 const UnitsConfig& units) {
  if (t == cplx(0.0, 0.0)) {
    throw ValidationError(
        "k_line_quadrature: propagator is singular at t = 0; probe the "
        "limit with delta_limit_check instead");
  }
  if (t.imag() > 0.0) {
    throw ValidationError("k_line_quadrature: Im t must be <= 0");
  }
  if (t.imag() == 0.0) {
    throw ConvergenceError(
        "k_line_quadrature: exactly real t leaves the momentum Gaussian "
        "undamped and the line integral oscillatory-divergent; add damping "
        "(Im t < 0) or use the closed forms");
  }
  if (kind == KLineIntegrand::delta && !(b > 0.0)) {
    throw ValidationError(
        "k_line_quadrature: the point-interaction integrand requires b > 0");
  }

  const double hbar = units.hbar;
  const double mass = units.mass;
  const double damping = -t.imag();
  const double k_max = std::sqrt(68.0 * mass / (hbar * damping));
  const double dist = std::abs(x - x_prime);
  const double dsum = std::abs(x) + std::abs(x_prime);
  const double alpha = mass * b / (hbar * hbar);
  const cplx quad_coef = -kImagUnit * hbar * t / (2.0 * mass);

  auto integrand = [&](double k) {
    const cplx gauss = std::exp(quad_coef * (k * k));
    cplx val = gauss * std::exp(kImagUnit * (k * dist));
    if (kind == KLineIntegrand::delta) {
      // Partial-fractioned reflection term; its pole k = -i*alpha stays off
      // the real line for every b > 0.
      val -= gauss * (kImagUnit * alpha / cplx(k, alpha)) *
             std::exp(kImagUnit * (k * dsum));
    }
    return val;
  };

  auto sweep = [&](int nodes) {
    const double h = 2.0 * k_max / nodes;
    KahanSum acc;
    for (int i = 0; i <= nodes; ++i) {
      const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
      const cplx v = integrand(-k_max + h * static_cast<double>(i));
      if (!finite(v)) {
        throw NumericalError(
            "k_line_quadrature: integrand evaluated to a non-finite value");
      }
      acc.add(w * v);
    }
    return acc.value() * (h / (2.0 * kPi));
  };

  // Start with enough nodes to resolve the fastest local oscillation of the
  // phase hbar k^2 Re(t) / (2m) + k (|x-x'| or |x|+|x'|), then refine.
  const double cycles = (hbar * k_max * k_max * std::abs(t) / (2.0 * mass) +
                         k_max * (dist + dsum)) /
                        (2.0 * kPi);
  const int exponent = std::max(
      10, static_cast<int>(std::ceil(std::log2(8.0 * std::max(1.0, cycles)))));
  int n = 1 << std::min(exponent, 22);

  cplx value = sweep(n);
  double est = std::abs(value - sweep(n / 2));
  for (int pass = 0; pass < 10 && n < (1 << 22); ++pass) {
    if (est <= 1e-13 * (std::abs(value) + 1e-30)) {
      break;
    }
    const cplx refined = sweep(2 * n);
    est = std::abs(refined - value);
    value = refined;
    n *= 2;
  }

  PropagatorEval out;
  out.point = EvalPoint{x, x_prime, t};
  out.value = value;
  out.method = PropagatorMethod::inverse_laplace;
  out.terms_used = n;
  out.est_error = est;
  return out;
}

cplx talbot_invert(const std::function<cplx(cplx)>& gbar, double tau,
                   int digits) {
  if (!(tau > 0.0)) {
    throw ValidationError("talbot_invert: tau must be positive");
  }
  if (digits < 4 || digits > 16) {
    throw ValidationError("talbot_invert: digits must lie in [4, 16]");
  }

  const int m = std::max(24, static_cast<int>(std::ceil(digits / 0.6)) + 8);
  const int n = 2 * m;
  const double r = 2.0 * m / (5.0 * tau);
  const double h = 2.0 * kPi / n;

  KahanSum acc;
  for (int j = 0; j < n; ++j) {
    const double theta = -kPi + (static_cast<double>(j) + 0.5) * h;
    const double sin_t = std::sin(theta);
    const double cot = std::cos(theta) / sin_t;
    const cplx s = r * theta * cplx(cot, 1.0);
    const cplx weight = std::exp(s * tau);
    if (std::abs(weight) == 0.0) {
      // Deep in the left half-plane the exponential underflows to exactly
      // zero; skip the node rather than multiply it into gbar.
      continue;
    }
    const cplx ds = r * cplx(cot - theta / (sin_t * sin_t), 1.0);
    const cplx term = weight * gbar(s) * ds;
    if (!finite(term)) {
      throw NumericalError(
          "talbot_invert: contour evaluation hit a singularity (non-finite "
          "transform value or overflow); the transform must be analytic on "
          "and right of the deformed contour");
    }
    acc.add(term);
  }
  return acc.value() * h / (2.0 * kPi * kImagUnit);
}

}  // namespace greenprop

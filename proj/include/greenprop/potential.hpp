#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "greenprop/errors.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

// Uniform 1-D grid with nodes at x_min + i*spacing, i = 0 .. n_points-1,
// so (n_points - 1) * spacing == x_max - x_min.
struct Grid1D {
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 2;
  double spacing = 0.0;

  static Grid1D linear(double x_min, double x_max, int n_points);
  double node(int i) const { return x_min + spacing * static_cast<double>(i); }
};

// A single evaluation request: the pair of spatial arguments plus the complex
// parameter, which is an energy E for Green functions and a time t for
// propagators (discriminated by context).
struct EvalPoint {
  double x = 0.0;
  double x_prime = 0.0;
  std::complex<double> param{0.0, 0.0};
};

// Tagged union over the potential catalog.
//
// The Delta variant's singular term b*delta(x) is carried symbolically (the
// strength b only) and is never sampled pointwise; the Green-function engine
// consumes it analytically through the dressing transformation, and the
// time-domain oracle through an interface condition at x = 0.
class PotentialModel {
 public:
  enum class Kind { Free, Delta, Harmonic, Custom };

  static PotentialModel free_particle();
  static PotentialModel harmonic(double omega);
  // Point interaction of strength b > 0 on a free background.
  static PotentialModel delta(double b);
  // Point interaction on a continuous background potential.
  static PotentialModel delta(double b, PotentialModel background);
  // Tabulated potential; xs strictly increasing, all values finite.
  // interpolation_order: 1 (piecewise linear) or 3 (piecewise cubic Hermite,
  // C^1 — the default, needed by the mode integrator).
  static PotentialModel custom(std::vector<double> xs, std::vector<double> vs,
                               int interpolation_order = 3);

  Kind kind() const { return kind_; }
  double omega() const;            // Harmonic only
  double delta_strength() const;   // Delta only
  const PotentialModel& background() const;  // Delta only
  // Sample range of a Custom potential.
  double custom_x_min() const;
  double custom_x_max() const;

  // Human-readable one-line description (used in run manifests).
  std::string describe() const;

  friend double potential_value(const PotentialModel&, double, const UnitsConfig&);
  friend double potential_derivative(const PotentialModel&, double, const UnitsConfig&);

 private:
  PotentialModel() = default;
  struct CustomTable;  // sorted samples + cubic Hermite slopes
  Kind kind_ = Kind::Free;
  double omega_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const PotentialModel> background_;  // Delta
  std::shared_ptr<const CustomTable> table_;          // Custom
};

// The regular (non-singular) part of V at x:
//   Free      -> 0
//   Harmonic  -> m omega^2 x^2 / 2
//   Custom    -> interpolated sample value (error outside the sample range)
//   Delta     -> value of the background (or 0); the delta spike itself is
//                handled analytically elsewhere and contributes nothing here.
double potential_value(const PotentialModel& model, double x,
                       const UnitsConfig& units = {});

// dV/dx of the regular part (same conventions); used by the WKB seeding of the
// numerical mode integrator.
double potential_derivative(const PotentialModel& model, double x,
                            const UnitsConfig& units = {});

// Potential + units loaded from a plain-text config file.
struct PotentialConfig {
  PotentialModel model = PotentialModel::free_particle();
  UnitsConfig units;
};

// Key-value section format:
//
//   [units]            # optional; natural units when absent
//   hbar = 1.0
//   mass = 1.0
//
//   [potential]
//   type = free | harmonic | delta | custom
//   omega = 1.0        # harmonic (and harmonic delta-background)
//   b = 1.0            # delta
//   background = free | harmonic   # delta only; default free
//   file = samples.csv # custom: two-column CSV (x, V), resolved relative
//                      # to the config file's directory
//   order = 3          # custom interpolation order (1 or 3)
PotentialConfig load_potential_config(const std::string& path);

// Two-column CSV (x, V) -> Custom potential. Lines starting with '#' and a
// single optional header row are skipped.
PotentialModel load_custom_csv(const std::string& path, int interpolation_order = 3);

}  // namespace greenprop

#pragma once

#include "greenprop/errors.hpp"

namespace greenprop {

// Physical constants of the one-particle Hamiltonian H = p^2/2m + V(x).
// Default construction gives natural units hbar = m = 1; all formulas in the
// library keep hbar and m symbolic so SI-scale runs work unchanged.
struct UnitsConfig {
  double hbar = 1.0;
  double mass = 1.0;
};

// Validating constructor: both constants must be strictly positive.
UnitsConfig make_units(double hbar, double mass);

}  // namespace greenprop

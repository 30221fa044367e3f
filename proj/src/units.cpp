#include "greenprop/units.hpp"

#include <cmath>
#include <string>

namespace greenprop {

UnitsConfig make_units(double hbar, double mass) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) {
    throw ValidationError("make_units: hbar must be finite and > 0, got " +
                          std::to_string(hbar));
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw ValidationError("make_units: mass must be finite and > 0, got " +
                          std::to_string(mass));
  }
  return UnitsConfig{hbar, mass};
}

}  // namespace greenprop

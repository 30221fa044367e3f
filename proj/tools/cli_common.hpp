#pragma once

#include <complex>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "greenprop/potential.hpp"
#include "greenprop/propagator.hpp"
#include "greenprop/records.hpp"
#include "greenprop/units.hpp"

namespace greenprop::cli {

// "RE,IM" (or a bare "RE") -> complex value. Raises ValidationError on junk.
cplx parse_complex(const std::string& text);

// "A:B:N" -> N equally spaced values from A to B inclusive (N >= 2, A < B).
std::vector<double> parse_range(const std::string& text);

// Potential / units flags shared by greens, propagator, and sweep.
struct PotentialOptions {
  std::string potential = "free";
  double b = 1.0;
  double omega = 1.0;
  std::string potential_file;  // custom: two-column (x, V) samples
  std::string config_path;     // full config file (units + potential)
  double hbar = 1.0;
  double mass = 1.0;
  // Option handles, for "was this flag given" precedence decisions.
  CLI::Option* potential_opt = nullptr;
  CLI::Option* b_opt = nullptr;
  CLI::Option* omega_opt = nullptr;
  CLI::Option* hbar_opt = nullptr;
  CLI::Option* mass_opt = nullptr;
};
void add_potential_flags(CLI::App& app, PotentialOptions& opts);

// Resolved model: config file first (when given), explicit flags override.
struct BuiltModel {
  PotentialModel model = PotentialModel::free_particle();
  UnitsConfig units{};
  std::string describe;     // compact echo for the manifest
  std::string config_path;  // echo of the config actually read
};
BuiltModel build_model(const PotentialOptions& opts);

// Output flags (--out, --format) and the stream they resolve to.
struct OutputOptions {
  std::string out_path;
  std::string format = "csv";
};
void add_output_flags(CLI::App& app, OutputOptions& opts, bool with_format);

class OutputStream {
 public:
  explicit OutputStream(const std::string& path);
  std::ostream& get();

 private:
  std::ofstream file_;
  bool to_file_ = false;
};

RunManifest make_manifest(const std::string& command, const BuiltModel& built,
                          const std::string& format,
                          std::optional<std::uint64_t> seed = std::nullopt);

// Closed-form kernel dispatch over the catalog (used by the propagator and
// sweep commands). Custom models and dressed non-free backgrounds have no
// closed kernel and raise ValidationError.
PropagatorEval closed_propagator(const PotentialModel& model, double x,
                                 double x_prime, cplx t,
                                 const UnitsConfig& units);

// argv joined into a shell-faithful single line (argv[0] reduced to its
// basename so the echo does not leak build paths).
std::string reconstruct_command(int argc, const char* const* argv);

// GREENPROP_TOL environment override for validation thresholds.
double tolerance_or(double fallback);

}  // namespace greenprop::cli

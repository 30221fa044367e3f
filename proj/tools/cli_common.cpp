#include "cli_common.hpp"

#include <cstdlib>
#include <sstream>

#include "greenprop/errors.hpp"

namespace greenprop::cli {

cplx parse_complex(const std::string& text) {
  const auto comma = text.find(',');
  const std::string re_part = text.substr(0, comma);
  const std::string im_part =
      comma == std::string::npos ? std::string{"0"} : text.substr(comma + 1);
  std::size_t used = 0;
  double re = 0.0;
  double im = 0.0;
  try {
    re = std::stod(re_part, &used);
    if (used != re_part.size()) throw ValidationError("trailing junk");
    im = std::stod(im_part, &used);
    if (used != im_part.size()) throw ValidationError("trailing junk");
  } catch (const ValidationError&) {
    throw ValidationError("complex argument must be RE or RE,IM; got '" +
                          text + "'");
  } catch (const std::exception&) {
    throw ValidationError("complex argument must be RE or RE,IM; got '" +
                          text + "'");
  }
  return {re, im};
}

std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos
                                          : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw ValidationError("range must be A:B:N; got '" + text + "'");
  }
  double lo = 0.0;
  double hi = 0.0;
  long n = 0;
  try {
    std::size_t used = 0;
    const std::string lo_s = text.substr(0, c1);
    const std::string hi_s = text.substr(c1 + 1, c2 - c1 - 1);
    const std::string n_s = text.substr(c2 + 1);
    lo = std::stod(lo_s, &used);
    if (used != lo_s.size()) throw ValidationError("junk");
    hi = std::stod(hi_s, &used);
    if (used != hi_s.size()) throw ValidationError("junk");
    n = std::stol(n_s, &used);
    if (used != n_s.size()) throw ValidationError("junk");
  } catch (const std::exception&) {
    throw ValidationError("range must be A:B:N; got '" + text + "'");
  }
  if (n < 2) throw ValidationError("range needs at least 2 points: " + text);
  if (!(lo < hi)) {
    throw ValidationError("range needs A < B: " + text);
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (long i = 0; i < n; ++i) {
    values[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
  }
  values.back() = hi;
  return values;
}

void add_potential_flags(CLI::App& app, PotentialOptions& opts) {
  opts.potential_opt =
      app.add_option("--potential", opts.potential,
                     "Potential kind: free, delta, harmonic, custom")
          ->check(CLI::IsMember({"free", "delta", "harmonic", "custom"}));
  opts.b_opt = app.add_option("--b", opts.b, "Delta interaction strength");
  opts.omega_opt =
      app.add_option("--omega", opts.omega, "Oscillator angular frequency");
  app.add_option("--potential-file", opts.potential_file,
                 "Two-column CSV of (x, V) samples for --potential custom");
  app.add_option("--config", opts.config_path,
                 "Config file providing units and potential");
  opts.hbar_opt = app.add_option("--hbar", opts.hbar, "Planck constant");
  opts.mass_opt = app.add_option("--mass", opts.mass, "Particle mass");
}

BuiltModel build_model(const PotentialOptions& opts) {
  BuiltModel built;
  bool have_model = false;
  if (!opts.config_path.empty()) {
    const PotentialConfig loaded = load_potential_config(opts.config_path);
    built.model = loaded.model;
    built.units = loaded.units;
    built.config_path = opts.config_path;
    have_model = true;
  }
  const bool potential_given =
      opts.potential_opt != nullptr && opts.potential_opt->count() > 0;
  if (potential_given || !have_model) {
    if (opts.potential == "free") {
      built.model = PotentialModel::free_particle();
    } else if (opts.potential == "delta") {
      built.model = PotentialModel::delta(opts.b);
    } else if (opts.potential == "harmonic") {
      built.model = PotentialModel::harmonic(opts.omega);
    } else if (opts.potential == "custom") {
      if (opts.potential_file.empty()) {
        throw ValidationError(
            "--potential custom requires --potential-file or --config");
      }
      built.model = load_custom_csv(opts.potential_file);
    } else {
      throw ValidationError("unknown potential '" + opts.potential + "'");
    }
  } else {
    // Model came from the config file; targeted flag overrides still apply.
    if (opts.b_opt != nullptr && opts.b_opt->count() > 0 &&
        built.model.kind() == PotentialModel::Kind::Delta) {
      built.model = PotentialModel::delta(opts.b, built.model.background());
    }
    if (opts.omega_opt != nullptr && opts.omega_opt->count() > 0 &&
        built.model.kind() == PotentialModel::Kind::Harmonic) {
      built.model = PotentialModel::harmonic(opts.omega);
    }
  }
  if (opts.hbar_opt != nullptr && opts.hbar_opt->count() > 0) {
    built.units.hbar = opts.hbar;
  }
  if (opts.mass_opt != nullptr && opts.mass_opt->count() > 0) {
    built.units.mass = opts.mass;
  }
  built.units = make_units(built.units.hbar, built.units.mass);
  built.describe = built.model.describe();
  return built;
}

void add_output_flags(CLI::App& app, OutputOptions& opts, bool with_format) {
  app.add_option("--out", opts.out_path,
                 "Write records to this file instead of stdout");
  if (with_format) {
    app.add_option("--format", opts.format, "Record format: csv or jsonl")
        ->check(CLI::IsMember({"csv", "jsonl"}));
  }
}

OutputStream::OutputStream(const std::string& path) {
  if (!path.empty()) {
    file_.open(path);
    if (!file_) throw ValidationError("cannot open output file: " + path);
    to_file_ = true;
  }
}

std::ostream& OutputStream::get() { return to_file_ ? file_ : std::cout; }

RunManifest make_manifest(const std::string& command, const BuiltModel& built,
                          const std::string& format,
                          std::optional<std::uint64_t> seed) {
  RunManifest manifest;
  manifest.command = command;
  manifest.config_path = built.config_path;
  manifest.units = built.units;
  manifest.potential = built.describe;
  manifest.output_format = format;
  manifest.seed = seed;
  manifest.timestamp = make_timestamp();
  return manifest;
}

std::string reconstruct_command(int argc, const char* const* argv) {
  std::ostringstream out;
  for (int i = 0; i < argc; ++i) {
    std::string token = argv[i];
    if (i == 0) {
      const auto slash = token.find_last_of('/');
      if (slash != std::string::npos) token = token.substr(slash + 1);
    }
    if (i > 0) out << ' ';
    const bool needs_quotes =
        token.empty() || token.find_first_of(" \t'\"\\") != std::string::npos;
    if (needs_quotes) {
      out << '\'';
      for (char c : token) {
        if (c == '\'') {
          out << "'\\''";
        } else {
          out << c;
        }
      }
      out << '\'';
    } else {
      out << token;
    }
  }
  return out.str();
}

PropagatorEval closed_propagator(const PotentialModel& model, double x,
                                 double x_prime, cplx t,
                                 const UnitsConfig& units) {
  switch (model.kind()) {
    case PotentialModel::Kind::Free:
      return propagator_free(x, x_prime, t, units);
    case PotentialModel::Kind::Delta:
      if (model.background().kind() != PotentialModel::Kind::Free) {
        throw ValidationError(
            "the closed point-interaction kernel requires a free background; "
            "use --method inverse-laplace for dressed backgrounds");
      }
      return propagator_delta(x, x_prime, t, model.delta_strength(), units);
    case PotentialModel::Kind::Harmonic:
      return propagator_harmonic(x, x_prime, t, model.omega(), units);
    case PotentialModel::Kind::Custom:
      throw ValidationError(
          "no closed-form kernel for custom potentials; use --method "
          "inverse-laplace");
  }
  throw ValidationError("unhandled potential kind");
}

double tolerance_or(double fallback) {
  const char* raw = std::getenv("GREENPROP_TOL");
  if (raw == nullptr || *raw == '\0') return fallback;
  char* end = nullptr;
  const double value = std::strtod(raw, &end);
  if (end == raw || *end != '\0' || !(value > 0.0)) {
    throw ValidationError(
        "GREENPROP_TOL must be a positive number when set; got '" +
        std::string(raw) + "'");
  }
  return value;
}

}  // namespace greenprop::cli

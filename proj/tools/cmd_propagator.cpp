#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/greens.hpp"
#include "greenprop/laplace.hpp"
#include "greenprop/propagator.hpp"
#include "greenprop/records.hpp"

namespace greenprop::cli {

namespace {

struct PropagatorOptions {
  PotentialOptions pot;
  OutputOptions io;
  double x = 0.0;
  double xprime = 0.0;
  std::string t;
  std::string method = "closed";
  int nmax = 60;
  double damping = 0.0;
};

}  // namespace

void register_cmd_propagator(CLI::App& app, const std::string& command_line) {
  auto opts = std::make_shared<PropagatorOptions>();
  CLI::App* cmd = app.add_subcommand(
      "propagator", "Evaluate the time-domain kernel K(x, x', t)");
  add_potential_flags(*cmd, opts->pot);
  add_output_flags(*cmd, opts->io, /*with_format=*/true);
  cmd->add_option("--x", opts->x, "Observation point")->required();
  cmd->add_option("--xprime", opts->xprime, "Source point")->required();
  cmd->add_option("--t", opts->t, "Complex time RE[,IM] (Im t <= 0)")
      ->required();
  cmd->add_option("--method", opts->method,
                  "closed, spectral (harmonic only), or inverse-laplace")
      ->check(CLI::IsMember({"closed", "spectral", "inverse-laplace"}));
  cmd->add_option("--nmax", opts->nmax,
                  "Spectral sum truncation order (spectral method)")
      ->check(CLI::Range(0, 500));
  cmd->add_option("--damping", opts->damping,
                  "Imaginary time shift t -> t - i*damping (spectral method)")
      ->check(CLI::NonNegativeNumber);
  cmd->callback([opts, command_line]() {
    const BuiltModel built = build_model(opts->pot);
    const cplx t = parse_complex(opts->t);
    PropagatorEval eval;
    if (opts->method == "closed") {
      eval =
          closed_propagator(built.model, opts->x, opts->xprime, t, built.units);
    } else if (opts->method == "spectral") {
      if (built.model.kind() != PotentialModel::Kind::Harmonic) {
        throw ValidationError(
            "the spectral sum is available for the harmonic potential only");
      }
      eval = spectral_sum_harmonic(opts->x, opts->xprime, t,
                                   built.model.omega(), built.units,
                                   SpectralSumConfig{opts->nmax, opts->damping});
    } else {  // inverse-laplace
      const PotentialModel model = built.model;
      const UnitsConfig units = built.units;
      const double x = opts->x;
      const double xprime = opts->xprime;
      const GreenEvaluator green = [model, units, x, xprime](cplx energy) {
        const EvalPoint point{x, xprime, energy};
        return evaluate_green(model, point, energy, units).value;
      };
      eval = bromwich_quadrature(green, t, ContourSpec{}, built.units, opts->x,
                                 opts->xprime);
    }
    const RunManifest manifest =
        make_manifest(command_line, built, opts->io.format);
    OutputStream out(opts->io.out_path);
    write_prop_records(out.get(), manifest, {eval});
  });
}

}  // namespace greenprop::cli

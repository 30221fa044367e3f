#include <memory>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/greens.hpp"
#include "greenprop/records.hpp"

namespace greenprop::cli {

namespace {

struct GreensOptions {
  PotentialOptions pot;
  OutputOptions io;
  double x = 0.0;
  double xprime = 0.0;
  std::string energy;
  std::string method = "auto";
};

}  // namespace

void register_cmd_greens(CLI::App& app, const std::string& command_line) {
  auto opts = std::make_shared<GreensOptions>();
  CLI::App* cmd = app.add_subcommand(
      "greens", "Evaluate the energy-domain kernel G(x, x', E)");
  add_potential_flags(*cmd, opts->pot);
  add_output_flags(*cmd, opts->io, /*with_format=*/true);
  cmd->add_option("--x", opts->x, "Observation point")->required();
  cmd->add_option("--xprime", opts->xprime, "Source point")->required();
  cmd->add_option("--energy", opts->energy, "Complex energy RE[,IM]")
      ->required();
  cmd->add_option("--method", opts->method,
                  "auto (closed forms preferred) or numerical (integrated "
                  "modes even when a closed form exists)")
      ->check(CLI::IsMember({"auto", "numerical"}));
  cmd->callback([opts, command_line]() {
    const BuiltModel built = build_model(opts->pot);
    const cplx energy = parse_complex(opts->energy);
    const EvalPoint point{opts->x, opts->xprime, energy};
    const GreenEval eval =
        evaluate_green(built.model, point, energy, built.units,
                       opts->method == "numerical");
    const RunManifest manifest =
        make_manifest(command_line, built, opts->io.format);
    OutputStream out(opts->io.out_path);
    write_green_records(out.get(), manifest, {eval});
  });
}

}  // namespace greenprop::cli

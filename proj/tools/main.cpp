#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/errors.hpp"

// Exit-code contract:
//   0  success
//   1  a validation suite reported failures
//   2  argument / configuration error
//   3  numerical failure (pole, caustic, unstable step, containment breach)
//   4  convergence failure (series or quadrature did not settle)
int main(int argc, char** argv) {
  CLI::App app{
      "greenprop: energy-domain kernels G(x, x', E) and time-domain kernels "
      "K(x, x', t) for one-dimensional Hamiltonians"};
  app.require_subcommand(1);

  const std::string command_line =
      greenprop::cli::reconstruct_command(argc, argv);
  int exit_code = 0;

  greenprop::cli::register_cmd_greens(app, command_line);
  greenprop::cli::register_cmd_propagator(app, command_line);
  greenprop::cli::register_cmd_sweep(app, command_line);
  greenprop::cli::register_cmd_validate(app, command_line, &exit_code);
  greenprop::cli::register_cmd_specfun_probe(app, command_line);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help and friends are not errors
  } catch (const greenprop::ValidationError& e) {
    std::cerr << "error (validation): " << e.what() << '\n';
    return 2;
  } catch (const greenprop::ConvergenceError& e) {
    std::cerr << "error (convergence): " << e.what() << '\n';
    return 4;
  } catch (const greenprop::NumericalError& e) {
    std::cerr << "error (numerical): " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return exit_code;
}

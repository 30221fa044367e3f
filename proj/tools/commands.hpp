#pragma once

#include <string>

namespace CLI {
class App;
}

namespace greenprop::cli {

// Each command registers itself on the root app; `command_line` is the echo
// stored in output manifests. Commands report failures by throwing the
// library error types, which main() maps onto the exit-code contract.
void register_cmd_greens(CLI::App& app, const std::string& command_line);
void register_cmd_propagator(CLI::App& app, const std::string& command_line);
void register_cmd_sweep(CLI::App& app, const std::string& command_line);
// validate sets *exit_code to 1 when any property fails.
void register_cmd_validate(CLI::App& app, const std::string& command_line,
                           int* exit_code);
void register_cmd_specfun_probe(CLI::App& app,
                                const std::string& command_line);

}  // namespace greenprop::cli

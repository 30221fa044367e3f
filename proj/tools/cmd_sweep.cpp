#include <algorithm>
#include <limits>
#include <memory>
#include <thread>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/greens.hpp"
#include "greenprop/records.hpp"

namespace greenprop::cli {

namespace {

struct SweepOptions {
  PotentialOptions pot;
  std::string out_path;
  std::string x_range;
  std::string xprime_range;
  std::string energy_range;
  std::string t_range;
  double x = 0.0;
  double xprime = 0.0;
  std::string energy;  // fixed complex energy (greens mode)
  std::string t;       // fixed complex time (propagator mode)
  double energy_im = 0.0;
  double t_im = 0.0;
  std::string method = "auto";
};

enum class ColAxis { x_prime, energy, time };

}  // namespace

void register_cmd_sweep(CLI::App& app, const std::string& command_line) {
  auto opts = std::make_shared<SweepOptions>();
  CLI::App* cmd = app.add_subcommand(
      "sweep",
      "Tabulate G or K over a grid of points; emits re/im/abs matrix blocks");
  add_potential_flags(*cmd, opts->pot);
  cmd->add_option("--out", opts->out_path,
                  "Write the matrix to this file instead of stdout");
  cmd->add_option("--x-range", opts->x_range,
                  "Row axis A:B:N over the observation point");
  cmd->add_option("--xprime-range", opts->xprime_range,
                  "Column axis A:B:N over the source point");
  cmd->add_option("--energy-range", opts->energy_range,
                  "Column axis A:B:N over Re E (greens mode)");
  cmd->add_option("--t-range", opts->t_range,
                  "Column axis A:B:N over Re t (propagator mode)");
  cmd->add_option("--x", opts->x, "Fixed observation point (no --x-range)");
  cmd->add_option("--xprime", opts->xprime,
                  "Fixed source point (no --xprime-range)");
  cmd->add_option("--energy", opts->energy,
                  "Fixed complex energy RE[,IM]; selects greens mode");
  cmd->add_option("--t", opts->t,
                  "Fixed complex time RE[,IM]; selects propagator mode");
  cmd->add_option("--energy-im", opts->energy_im,
                  "Imaginary part added to every --energy-range node");
  cmd->add_option("--t-im", opts->t_im,
                  "Imaginary part added to every --t-range node");
  cmd->add_option("--method", opts->method,
                  "Greens-mode dispatch: auto or numerical")
      ->check(CLI::IsMember({"auto", "numerical"}));
  cmd->callback([opts, command_line]() {
    const BuiltModel built = build_model(opts->pot);

    const bool greens_mode =
        !opts->energy.empty() || !opts->energy_range.empty();
    const bool prop_mode = !opts->t.empty() || !opts->t_range.empty();
    if (greens_mode == prop_mode) {
      throw ValidationError(
          "give exactly one of --energy/--energy-range (kernel G) or "
          "--t/--t-range (kernel K)");
    }
    if (!opts->energy.empty() && !opts->energy_range.empty()) {
      throw ValidationError("give either --energy or --energy-range, not both");
    }
    if (!opts->t.empty() && !opts->t_range.empty()) {
      throw ValidationError("give either --t or --t-range, not both");
    }

    // Row axis: the observation point (a range, or a single fixed row).
    std::vector<double> rows;
    if (!opts->x_range.empty()) {
      rows = parse_range(opts->x_range);
    } else {
      rows = {opts->x};
    }

    // Column axis: exactly one of source point, energy, or time may sweep.
    int col_ranges = (!opts->xprime_range.empty() ? 1 : 0) +
                     (!opts->energy_range.empty() ? 1 : 0) +
                     (!opts->t_range.empty() ? 1 : 0);
    if (col_ranges > 1) {
      throw ValidationError(
          "only one column axis: --xprime-range, --energy-range, or "
          "--t-range");
    }
    ColAxis axis = ColAxis::x_prime;
    std::vector<double> cols;
    std::string col_label = "x_prime";
    if (!opts->xprime_range.empty()) {
      cols = parse_range(opts->xprime_range);
    } else if (!opts->energy_range.empty()) {
      axis = ColAxis::energy;
      cols = parse_range(opts->energy_range);
      col_label = "re_E";
    } else if (!opts->t_range.empty()) {
      axis = ColAxis::time;
      cols = parse_range(opts->t_range);
      col_label = "re_t";
    } else {
      cols = {opts->xprime};
    }
    if (opts->x_range.empty() && col_ranges == 0) {
      throw ValidationError(
          "nothing to sweep: give --x-range or a column range");
    }

    const cplx fixed_energy =
        opts->energy.empty() ? cplx{0.0, 0.0} : parse_complex(opts->energy);
    const cplx fixed_t =
        opts->t.empty() ? cplx{0.0, 0.0} : parse_complex(opts->t);
    const bool force_numerical = opts->method == "numerical";
    const PotentialModel model = built.model;
    const UnitsConfig units = built.units;
    const double energy_im = opts->energy_im;
    const double t_im = opts->t_im;

    const auto eval_cell = [&](double xi, double col) -> cplx {
      double xp = opts->xprime;
      if (axis == ColAxis::x_prime) xp = col;
      if (greens_mode) {
        const cplx energy =
            axis == ColAxis::energy ? cplx{col, energy_im} : fixed_energy;
        const EvalPoint point{xi, xp, energy};
        return evaluate_green(model, point, energy, units, force_numerical)
            .value;
      }
      const cplx t = axis == ColAxis::time ? cplx{col, t_im} : fixed_t;
      return closed_propagator(model, xi, xp, t, units).value;
    };

    // Probe one interior cell up front so configuration-level errors (no
    // closed kernel for this model, malformed potential file, ...) surface as
    // argument errors instead of an all-NaN matrix. Point singularities
    // (poles, caustics) are per-cell affairs and stay inside the sweep.
    try {
      (void)eval_cell(rows[rows.size() / 2], cols[cols.size() / 2]);
    } catch (const NumericalError&) {
    } catch (const ConvergenceError&) {
    }

    const std::size_t n_rows = rows.size();
    const std::size_t n_cols = cols.size();
    std::vector<cplx> cells(n_rows * n_cols);
    const double qnan = std::numeric_limits<double>::quiet_NaN();

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t n_threads =
        std::min({static_cast<std::size_t>(hw), n_rows,
                  static_cast<std::size_t>(8)});
    const auto worker = [&](std::size_t first_row) {
      for (std::size_t i = first_row; i < n_rows; i += n_threads) {
        for (std::size_t j = 0; j < n_cols; ++j) {
          cplx value{qnan, qnan};
          try {
            value = eval_cell(rows[i], cols[j]);
          } catch (const NumericalError&) {
          } catch (const ConvergenceError&) {
          } catch (const ValidationError&) {
          }
          cells[i * n_cols + j] = value;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads - 1);
    for (std::size_t k = 1; k < n_threads; ++k) pool.emplace_back(worker, k);
    worker(0);
    for (auto& th : pool) th.join();

    SweepMatrix matrix;
    matrix.row_label = "x";
    matrix.col_label = col_label;
    matrix.row_values = rows;
    matrix.col_values = cols;
    matrix.cells = std::move(cells);

    const RunManifest manifest = make_manifest(command_line, built, "csv");
    OutputStream out(opts->out_path);
    write_sweep_matrix(out.get(), manifest, matrix);
  });
}

}  // namespace greenprop::cli

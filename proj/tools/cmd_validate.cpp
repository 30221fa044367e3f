#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <memory>
#include <random>
#include <vector>

#include <json.hpp>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/greens.hpp"
#include "greenprop/propagator.hpp"
#include "greenprop/records.hpp"
#include "greenprop/specfun.hpp"
#include "greenprop/tdse.hpp"

namespace greenprop::cli {

namespace {

const UnitsConfig kNatural{};

struct PropertyReport {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double runtime_s = 0.0;
  std::string detail;
};

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Smooth anharmonic well used as the "no closed form anywhere" catalog entry:
// V(x) = 0.05 x^4 sampled densely enough that the table is exact to the
// interpolation order.
PotentialModel quartic_model() {
  std::vector<double> xs;
  std::vector<double> vs;
  const int n = 401;
  xs.reserve(n);
  vs.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = -8.0 + 16.0 * static_cast<double>(i) / (n - 1);
    xs.push_back(x);
    vs.push_back(0.05 * x * x * x * x);
  }
  return PotentialModel::custom(std::move(xs), std::move(vs));
}

// ---------------------------------------------------------------------------
// jump: the derivative of G across the source point must drop by exactly
// -2m/hbar, for every potential in the catalog and random (x', E).
PropertyReport run_jump(std::uint64_t seed) {
  PropertyReport report;
  report.name = "jump";
  report.tolerance = tolerance_or(1e-6);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw_x(-1.5, 1.5);
  std::uniform_real_distribution<double> draw_re(0.2, 2.4);
  std::uniform_real_distribution<double> draw_im(0.1, 1.0);
  int checks = 0;

  const auto check_direct = [&](const PotentialModel& model,
                                bool keep_off_kink) {
    for (int i = 0; i < 15; ++i) {
      double xp = draw_x(rng);
      // The point interaction has its own derivative kink at x = 0; keep the
      // stencil of the x' jump clear of it.
      while (keep_off_kink && std::abs(xp) < 0.05) xp = draw_x(rng);
      const cplx energy{draw_re(rng), draw_im(rng)};
      const auto g = [&model, xp, energy](double x) {
        return evaluate_green(model, EvalPoint{x, xp, energy}, energy,
                              kNatural)
            .value;
      };
      report.max_residual =
          std::max(report.max_residual, jump_residual(g, xp, kNatural));
      ++checks;
    }
  };
  // Mode-based evaluations solve the boundary problem once per energy and
  // reuse the pair across the whole stencil.
  const auto check_modes = [&](const std::function<ModePair(cplx)>& factory) {
    for (int i = 0; i < 15; ++i) {
      const double xp = draw_x(rng);
      const cplx energy{draw_re(rng), draw_im(rng)};
      const auto pair = std::make_shared<ModePair>(factory(energy));
      const auto g = [pair, xp, energy](double x) {
        return assemble_green(*pair, EvalPoint{x, xp, energy}, kNatural)
            .value;
      };
      report.max_residual =
          std::max(report.max_residual, jump_residual(g, xp, kNatural));
      ++checks;
    }
  };

  check_direct(PotentialModel::free_particle(), false);
  check_modes([](cplx energy) {
    return make_harmonic_modes(energy, 1.0, kNatural);
  });
  check_direct(PotentialModel::delta(1.0), true);
  const PotentialModel quartic = quartic_model();
  check_modes([&quartic](cplx energy) {
    return solve_custom_modes(quartic, energy, kNatural);
  });

  report.pass = report.max_residual < report.tolerance;
  report.detail = std::to_string(checks) +
                  " random derivative-jump checks across free, harmonic, "
                  "point-interaction, and sampled-quartic potentials";
  return report;
}

// ---------------------------------------------------------------------------
// symmetry: G(x, x', E) = G(x', x, E) for every catalog entry.
PropertyReport run_symmetry(std::uint64_t seed) {
  PropertyReport report;
  report.name = "symmetry";
  report.tolerance = tolerance_or(1e-12);
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> draw_x(-1.5, 1.5);
  std::uniform_real_distribution<double> draw_re(0.2, 2.4);
  std::uniform_real_distribution<double> draw_im(0.1, 1.0);

  const std::vector<PotentialModel> catalog = {
      PotentialModel::free_particle(), PotentialModel::harmonic(1.0),
      PotentialModel::delta(1.0), quartic_model()};
  int checks = 0;
  for (const auto& model : catalog) {
    for (int i = 0; i < 10; ++i) {
      const double x = draw_x(rng);
      double xp = draw_x(rng);
      while (std::abs(x - xp) < 1e-3) xp = draw_x(rng);
      const cplx energy{draw_re(rng), draw_im(rng)};
      const cplx a =
          evaluate_green(model, EvalPoint{x, xp, energy}, energy, kNatural)
              .value;
      const cplx b =
          evaluate_green(model, EvalPoint{xp, x, energy}, energy, kNatural)
              .value;
      report.max_residual = std::max(
          report.max_residual, std::abs(a - b) / std::max(std::abs(a), 1e-30));
      ++checks;
    }
  }
  report.pass = report.max_residual < report.tolerance;
  report.detail =
      std::to_string(checks) + " argument-swap checks across the catalog";
  return report;
}

// ---------------------------------------------------------------------------
// wronskian: (a) the mode-pair Wronskian is constant across the domain;
// (b) for the oscillator it equals -sqrt(2 m w / hbar) sqrt(2 pi) / Gamma(-p).
PropertyReport run_wronskian(std::uint64_t) {
  PropertyReport report;
  report.name = "wronskian";
  report.tolerance = tolerance_or(1e-8);
  const std::vector<double> probes{-2.5, -1.25, 0.0, 1.25, 2.5};

  const auto spread = [&probes](const ModePair& pair) {
    cplx mean{0.0, 0.0};
    std::vector<cplx> w;
    w.reserve(probes.size());
    for (double x : probes) {
      const cplx wi = pair.u_minus(x) * pair.du_plus(x) -
                      pair.u_plus(x) * pair.du_minus(x);
      w.push_back(wi);
      mean += wi;
    }
    mean /= static_cast<double>(w.size());
    double worst = 0.0;
    for (const cplx& wi : w) {
      worst = std::max(worst, std::abs(wi - mean) / std::abs(mean));
    }
    return worst;
  };

  const PotentialModel quartic = quartic_model();
  for (const cplx energy : {cplx{0.8, 0.3}, cplx{1.6, 0.2}}) {
    report.max_residual = std::max(
        report.max_residual, spread(solve_custom_modes(quartic, energy,
                                                       kNatural)));
  }
  report.max_residual =
      std::max(report.max_residual,
               spread(make_harmonic_modes(cplx{0.75, 0.2}, 1.0, kNatural)));

  // Closed-form identity for the oscillator pair.
  double worst_identity = 0.0;
  const std::vector<std::pair<cplx, double>> cases = {
      {{0.75, 0.2}, 1.0}, {{1.3, 0.15}, 1.0}, {{0.6, 0.1}, 2.0}};
  for (const auto& [energy, omega] : cases) {
    const ModePair pair = make_harmonic_modes(energy, omega, kNatural);
    const cplx p = energy / omega - 0.5;  // hbar = 1
    const cplx reference = -std::sqrt(2.0 * omega) *
                           std::sqrt(2.0 * std::acos(-1.0)) /
                           gamma_complex(-p).value;
    worst_identity =
        std::max(worst_identity, std::abs(pair.wronskian / reference - 1.0));
  }
  report.max_residual = std::max(report.max_residual, worst_identity);

  report.pass = report.max_residual < report.tolerance;
  report.detail =
      "x-independence of integrated and closed mode pairs; oscillator "
      "Wronskian vs -sqrt(2 m w/hbar) sqrt(2 pi)/Gamma(-p), identity part " +
      short_num(worst_identity);
  return report;
}

// ---------------------------------------------------------------------------
// mehler: the Hermite bilinear sum against its Gaussian closed form.
PropertyReport run_mehler(std::uint64_t) {
  PropertyReport report;
  report.name = "mehler";
  report.tolerance = tolerance_or(1e-10);
  const std::vector<std::pair<double, double>> points = {
      {0.3, -0.4}, {1.1, 0.7}, {-0.9, 1.3}};
  const std::vector<std::pair<cplx, int>> terms = {
      {{0.10, 0.0}, 40},
      {{0.20, 0.0}, 40},
      {{0.25, 0.0}, 40},
      {cplx{0.25, 0.0} * std::exp(cplx{0.0, std::acos(-1.0) / 7.0}), 40},
      {{0.30, 0.0}, 60}};
  int checks = 0;
  for (const auto& [z, zp] : points) {
    for (const auto& [xi, n_max] : terms) {
      const cplx sum = mehler_sum(z, zp, xi, n_max);
      const cplx closed = mehler_closed(z, zp, xi);
      report.max_residual =
          std::max(report.max_residual, std::abs(sum - closed));
      ++checks;
    }
  }
  report.pass = report.max_residual < report.tolerance;
  report.detail = std::to_string(checks) +
                  " ratio-grid comparisons of the bilinear Hermite sum "
                  "against its Gaussian closed form";
  return report;
}

// ---------------------------------------------------------------------------
// spectral: deep truncation of the oscillator eigenfunction series must
// reproduce the closed oscillator kernel.
PropertyReport run_spectral(std::uint64_t) {
  PropertyReport report;
  report.name = "spectral";
  report.tolerance = tolerance_or(1e-8);
  const SpectralSumConfig cfg{250, 0.0};
  struct Case {
    double x, xp;
    cplx t;
  };
  const std::vector<Case> cases = {{0.4, 0.1, {1.0, -0.1}},
                                   {-0.7, 0.5, {0.7, -0.2}},
                                   {0.0, 0.0, {2.2, -0.15}}};
  for (const auto& c : cases) {
    const cplx series =
        spectral_sum_harmonic(c.x, c.xp, c.t, 1.0, kNatural, cfg).value;
    const cplx closed = propagator_harmonic(c.x, c.xp, c.t, 1.0, kNatural)
                            .value;
    report.max_residual =
        std::max(report.max_residual, std::abs(series - closed) /
                                          std::abs(closed));
  }
  report.pass = report.max_residual < report.tolerance;
  report.detail =
      "250-term eigenfunction series vs the closed oscillator kernel at "
      "three damped times";
  return report;
}

// ---------------------------------------------------------------------------
// oracle: Crank-Nicolson time stepping against kernel convolution for the
// three closed-form potentials, using the calibrated grids.
PropertyReport run_oracle(std::uint64_t) {
  PropertyReport report;
  report.name = "oracle";
  report.tolerance = tolerance_or(5e-3);
  EvolveConfig cfg;
  cfg.dt = 1e-4;
  std::vector<double> distances;

  // Free line, t = 1.
  {
    const auto grid = Grid1D::linear(-9.0, 9.0, 901);
    const auto psi0 = make_state(
        grid, [](double x) { return cplx(std::exp(-x * x / 4.0), 0.0); }, 0.0,
        true);
    cfg.n_steps = 10000;
    const auto cn = evolve_crank_nicolson(
        psi0, PotentialModel::free_particle(), cfg, kNatural);
    const auto conv = apply_propagator(
        [](double x, double xp, cplx t) {
          return propagator_free(x, xp, t, kNatural).value;
        },
        psi0, {cfg.dt * cfg.n_steps, 0.0});
    distances.push_back(compare_l2(cn, conv).plain);
  }

  // Oscillator, one quarter period.
  {
    const auto grid = Grid1D::linear(-8.0, 8.0, 801);
    const auto psi0 = make_state(
        grid,
        [](double x) {
          const double s = 0.7;
          return cplx(std::exp(-(x + 1.0) * (x + 1.0) / (4.0 * s * s)), 0.0);
        },
        0.0, true);
    cfg.n_steps = 15708;
    const auto cn =
        evolve_crank_nicolson(psi0, PotentialModel::harmonic(1.0), cfg,
                              kNatural);
    const auto conv = apply_propagator(
        [](double x, double xp, cplx t) {
          return propagator_harmonic(x, xp, t, 1.0, kNatural).value;
        },
        psi0, {cfg.dt * cfg.n_steps, 0.0});
    distances.push_back(compare_l2(cn, conv).plain);
  }

  // Point interaction: the switch-on radiates a slowly decaying transient, so
  // the stepper runs behind an absorbing layer and the tolerance is wider.
  {
    const auto grid = Grid1D::linear(-10.0, 10.0, 1001);
    const auto psi0 = make_state(
        grid,
        [](double x) {
          return cplx(std::exp(-0.5 * (x + 1.5) * (x + 1.5)), 0.0);
        },
        0.0, true);
    cfg.n_steps = 10000;
    cfg.boundary.kind = BoundaryKind::absorbing_layer;
    cfg.boundary.width = 2.0;
    cfg.boundary.strength = 150.0;
    const auto cn = evolve_crank_nicolson(psi0, PotentialModel::delta(1.0),
                                          cfg, kNatural);
    ConvolveOptions kink;
    kink.cusp_points = {0.0};
    const auto conv = apply_propagator(
        [](double x, double xp, cplx t) {
          return propagator_delta(x, xp, t, 1.0, kNatural).value;
        },
        psi0, {cfg.dt * cfg.n_steps, 0.0}, kink);
    distances.push_back(compare_l2(cn, conv).plain);
  }

  for (double d : distances) {
    report.max_residual = std::max(report.max_residual, d);
  }
  report.pass = report.max_residual < report.tolerance;
  report.detail = "L2(time stepper, kernel convolution): free " +
                  short_num(distances[0]) + ", oscillator " +
                  short_num(distances[1]) + ", point interaction " +
                  short_num(distances[2]) + " (absorbing layer)";
  return report;
}

}  // namespace

void register_cmd_validate(CLI::App& app, const std::string& command_line,
                           int* exit_code) {
  struct ValidateOptions {
    std::string suite = "all";
    std::uint64_t seed = 12345;
    std::string out_path;
  };
  auto opts = std::make_shared<ValidateOptions>();
  CLI::App* cmd = app.add_subcommand(
      "validate", "Run self-check suites and emit a JSON report");
  cmd->add_option("--suite", opts->suite, "Which property family to check")
      ->check(CLI::IsMember({"jump", "symmetry", "wronskian", "mehler",
                             "spectral", "oracle", "all"}));
  cmd->add_option("--seed", opts->seed, "Seed for the randomized draws");
  cmd->add_option("--out", opts->out_path,
                  "Write the report to this file instead of stdout");
  cmd->callback([opts, command_line, exit_code]() {
    using Runner = PropertyReport (*)(std::uint64_t);
    const std::vector<std::pair<std::string, Runner>> suites = {
        {"jump", run_jump},         {"symmetry", run_symmetry},
        {"wronskian", run_wronskian}, {"mehler", run_mehler},
        {"spectral", run_spectral}, {"oracle", run_oracle}};

    BuiltModel catalog;
    catalog.describe = "catalog (free, harmonic, delta, custom)";
    RunManifest manifest =
        make_manifest(command_line, catalog, "json", opts->seed);

    nlohmann::ordered_json properties = nlohmann::ordered_json::array();
    bool all_pass = true;
    for (const auto& [name, runner] : suites) {
      if (opts->suite != "all" && opts->suite != name) continue;
      const auto start = std::chrono::steady_clock::now();
      const PropertyReport r = runner(opts->seed);
      const double runtime =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        start)
              .count();
      properties.push_back({{"name", r.name},
                            {"pass", r.pass},
                            {"max_residual", r.max_residual},
                            {"tolerance", r.tolerance},
                            {"runtime_s", runtime},
                            {"detail", r.detail}});
      all_pass = all_pass && r.pass;
    }

    nlohmann::ordered_json report;
    report["manifest"] = nlohmann::ordered_json::parse(manifest_json(manifest));
    report["properties"] = properties;
    report["all_pass"] = all_pass;

    OutputStream out(opts->out_path);
    out.get() << report.dump(2) << '\n';
    if (!all_pass) *exit_code = 1;
  });
}

}  // namespace greenprop::cli

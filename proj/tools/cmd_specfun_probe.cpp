#include <memory>
#include <ostream>

#include "cli_common.hpp"
#include "commands.hpp"
#include "greenprop/records.hpp"
#include "greenprop/specfun.hpp"

namespace greenprop::cli {

namespace {

struct ProbeOptions {
  std::string function = "gamma";
  double from = -3.0;
  double to = 3.0;
  int n = 61;
  double im = 0.0;       // imaginary offset of the swept argument
  std::string p = "0.25";  // parabolic cylinder order
  int order = 5;           // Hermite degree
  std::string out_path;
};

void print_row(std::ostream& out, double x, cplx value, double est_error) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", x, value.real(),
                value.imag(), est_error);
  out << buf << '\n';
}

}  // namespace

void register_cmd_specfun_probe(CLI::App& app,
                                const std::string& command_line) {
  auto opts = std::make_shared<ProbeOptions>();
  CLI::App* cmd = app.add_subcommand(
      "specfun-probe",
      "Tabulate one special function over a real sweep (diagnostics)");
  cmd->group("");  // hidden from --help
  cmd->add_option("--function", opts->function,
                  "gamma, dp, dpderiv, erfc, erfcx, faddeeva, or hermite")
      ->check(CLI::IsMember({"gamma", "dp", "dpderiv", "erfc", "erfcx",
                             "faddeeva", "hermite"}));
  cmd->add_option("--from", opts->from, "Sweep start");
  cmd->add_option("--to", opts->to, "Sweep end");
  cmd->add_option("--n", opts->n, "Node count")->check(CLI::Range(2, 100000));
  cmd->add_option("--im", opts->im,
                  "Imaginary offset added to the swept argument");
  cmd->add_option("--p", opts->p, "Order RE[,IM] for dp / dpderiv");
  cmd->add_option("--order", opts->order, "Degree for hermite")
      ->check(CLI::Range(0, 500));
  cmd->add_option("--out", opts->out_path,
                  "Write the table to this file instead of stdout");
  cmd->callback([opts, command_line]() {
    if (!(opts->from < opts->to)) {
      throw ValidationError("--from must be below --to");
    }
    BuiltModel none;
    none.describe = "-";
    const RunManifest manifest = make_manifest(command_line, none, "csv");
    OutputStream out(opts->out_path);
    out.get() << "# manifest " << manifest_json(manifest) << '\n';
    out.get() << "x,re,im,est_error\n";
    const cplx p = parse_complex(opts->p);
    for (int i = 0; i < opts->n; ++i) {
      const double x = opts->from + (opts->to - opts->from) *
                                        static_cast<double>(i) /
                                        (opts->n - 1);
      const cplx z{x, opts->im};
      if (opts->function == "gamma") {
        const SpecFunResult r = gamma_complex(z);
        print_row(out.get(), x, r.value, r.est_error);
      } else if (opts->function == "dp") {
        const SpecFunResult r = parabolic_cylinder_d(p, x);
        print_row(out.get(), x, r.value, r.est_error);
      } else if (opts->function == "dpderiv") {
        const SpecFunResult r = parabolic_cylinder_d_deriv(p, x);
        print_row(out.get(), x, r.value, r.est_error);
      } else if (opts->function == "erfc") {
        const SpecFunResult r = erfc_complex(z);
        print_row(out.get(), x, r.value, r.est_error);
      } else if (opts->function == "erfcx") {
        const SpecFunResult r = erfcx_complex(z);
        print_row(out.get(), x, r.value, r.est_error);
      } else if (opts->function == "faddeeva") {
        print_row(out.get(), x, faddeeva_w(z), 0.0);
      } else {  // hermite
        print_row(out.get(), x, cplx{hermite_h(opts->order, x), 0.0}, 0.0);
      }
    }
  });
}

}  // namespace greenprop::cli

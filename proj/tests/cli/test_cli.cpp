// End-to-end checks of the greenprop executable: every public subcommand, the
// exit-code contract, artifact self-description, and reproducibility. The
// binary path is injected at configure time as GREENPROP_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "greenprop/records.hpp"

namespace fs = std::filesystem;
using greenprop::cplx;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

// Runs the tool through the shell; `env` is a prefix like "FOO=1 BAR=2".
RunResult run_tool(const std::string& args, const std::string& env = "",
                   bool merge_stderr = false) {
  std::string cmd = env.empty() ? std::string{} : env + " ";
  cmd += std::string{GREENPROP_BIN} + " " + args;
  cmd += merge_stderr ? " 2>&1" : " 2>/dev/null";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) {
    result.out.append(buf.data(), got);
  }
  const int status = ::pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "greenprop_cli_scratch";
  fs::create_directories(dir);
  return dir;
}

greenprop::RecordsFile parse_records(const std::string& text) {
  std::istringstream in(text);
  return greenprop::read_records(in);
}

// Pins the wall clock so artifacts can be compared byte for byte.
const std::string kPinnedClock = "SOURCE_DATE_EPOCH=1700000000";

}  // namespace

TEST_CASE("free-line energy record matches the analytic kernel") {
  const auto r = run_tool(
      "greens --potential free --x 0 --xprime 1 --energy 0.5,0");
  REQUIRE(r.exit_code == 0);
  const auto file = parse_records(r.out);
  CHECK(file.kind == "greens");
  REQUIRE(file.greens.size() == 1);
  const auto& rec = file.greens.front();
  // G(0, 1, 1/2) = i e^{i} = -sin 1 + i cos 1 in natural units.
  const cplx expected{-std::sin(1.0), std::cos(1.0)};
  CHECK(std::abs(rec.value - expected) < 1e-12);
  CHECK(greenprop::to_string(rec.method) == "closed_free");
  CHECK(file.manifest.potential == "free");
  CHECK(file.manifest.command.find("greens --potential free") !=
        std::string::npos);
}

TEST_CASE("bound-state energies exit with the numerical-failure code") {
  const auto r = run_tool(
      "greens --potential harmonic --x 0 --xprime 0.5 --energy 0.5,0", "",
      true);
  CHECK(r.exit_code == 3);
  CHECK(r.out.find("bound state") != std::string::npos);
}

TEST_CASE("a custom potential file flows through the numerical path") {
  const fs::path csv = scratch_dir() / "quartic.csv";
  {
    std::ofstream out(csv);
    out << "x,V\n";
    for (int i = 0; i <= 1200; ++i) {
      const double x = -6.0 + 12.0 * i / 1200.0;
      char line[80];
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", x, x * x * x * x);
      out << line;
    }
  }
  const auto r = run_tool("greens --potential custom --potential-file " +
                          csv.string() + " --x 0.5 --xprime -0.5 --energy 1,0.5");
  REQUIRE(r.exit_code == 0);
  const auto file = parse_records(r.out);
  REQUIRE(file.greens.size() == 1);
  CHECK(greenprop::to_string(file.greens.front().method) == "numerical_modes");
  CHECK(file.greens.front().est_error > 0.0);
  CHECK(file.greens.front().est_error < 1e-8);
  CHECK(std::isfinite(file.greens.front().value.real()));

  // Missing sample file is an argument error.
  const auto bad = run_tool(
      "greens --potential custom --x 0 --xprime 1 --energy 1,0.5");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("closed free kernel record carries the right value") {
  const auto r = run_tool(
      "propagator --potential free --method closed --x 0 --xprime 0 --t 1,0");
  REQUIRE(r.exit_code == 0);
  const auto file = parse_records(r.out);
  CHECK(file.kind == "propagator");
  REQUIRE(file.props.size() == 1);
  // K(0, 0, 1) = (2 pi)^{-1/2} e^{-i pi/4}.
  const double mag = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const cplx expected = mag * std::exp(cplx{0.0, -std::numbers::pi / 4.0});
  CHECK(std::abs(file.props.front().value - expected) < 1e-12);
  CHECK(file.props.front().terms_used == 0);
}

TEST_CASE("shallow spectral sums carry their own error bar") {
  const std::string at =
      "--potential harmonic --x 0.3 --xprime -0.2 --t 1,-0.05 ";
  const auto closed =
      parse_records(run_tool("propagator " + at + "--method closed").out)
          .props.front()
          .value;

  // At n_max = 60 the geometric tail |e^{-i w t}|^n has only fallen to
  // e^{-3}: the truncated sum sits ~1e-3 away from the closed kernel, and
  // the record's own error estimate must admit it.
  const auto shallow = parse_records(
      run_tool("propagator " + at + "--method spectral --nmax 60").out);
  REQUIRE(shallow.props.size() == 1);
  const double deviation = std::abs(shallow.props.front().value - closed);
  CHECK(deviation > 1e-4);
  CHECK(deviation < 1e-2);
  CHECK(shallow.props.front().est_error > deviation / 3.0);
  CHECK(shallow.props.front().terms_used == 61);

  // Deep truncation converges to the closed kernel.
  const auto deep = parse_records(
      run_tool("propagator " + at + "--method spectral --nmax 400").out);
  CHECK(std::abs(deep.props.front().value - closed) < 1e-8);
}

TEST_CASE("inverse-laplace reproduces the closed point-interaction kernel") {
  const std::string at =
      "--potential delta --b 1 --x 0.5 --xprime 0.5 --t 0,-0.8 ";
  const auto closed =
      parse_records(run_tool("propagator " + at + "--method closed").out)
          .props.front()
          .value;
  const auto laplace = parse_records(
      run_tool("propagator " + at + "--method inverse-laplace").out);
  REQUIRE(laplace.props.size() == 1);
  CHECK(std::abs(laplace.props.front().value - closed) < 1e-6);
  CHECK(greenprop::to_string(laplace.props.front().method) ==
        "inverse_laplace");
}

TEST_CASE("imaginary-time sweep peaks on the diagonal") {
  const fs::path out = scratch_dir() / "sweep_free.csv";
  const auto r = run_tool(
      "sweep --potential free --x-range -3:3:64 --xprime-range -3:3:64 "
      "--t 0,-0.5 --out " +
      out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  const auto matrix = greenprop::read_sweep_matrix(in);
  REQUIRE(matrix.row_values.size() == 64);
  REQUIRE(matrix.col_values.size() == 64);
  CHECK(matrix.row_label == "x");
  CHECK(matrix.col_label == "x_prime");
  for (std::size_t i = 0; i < 64; ++i) {
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t j = 0; j < 64; ++j) {
      const double mag = std::abs(matrix.cells[i * 64 + j]);
      if (mag > best_mag) {
        best_mag = mag;
        best = j;
      }
    }
    CHECK(best == i);  // heat kernel: maximal where x' = x
  }
}

TEST_CASE("energy sweep flags exactly the bound-state columns") {
  const fs::path out = scratch_dir() / "sweep_harm.csv";
  const auto r = run_tool(
      "sweep --potential harmonic --x 0.3 --xprime 0.7 --energy-range 0:3:31 "
      "--out " +
      out.string());
  REQUIRE(r.exit_code == 0);
  {
    std::ifstream in(out);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    CHECK(text.find("# flagged_cols 5 15 25") != std::string::npos);
  }
  std::ifstream in(out);
  const auto matrix = greenprop::read_sweep_matrix(in);
  REQUIRE(matrix.col_values.size() == 31);
  for (std::size_t j = 0; j < 31; ++j) {
    const bool pole = (j == 5 || j == 15 || j == 25);  // E = 0.5, 1.5, 2.5
    CHECK(std::isnan(matrix.cells[j].real()) == pole);
  }
}

TEST_CASE("the interaction kink shows up at the origin") {
  const fs::path out = scratch_dir() / "sweep_delta.csv";
  const auto r = run_tool(
      "sweep --potential delta --b 1 --x-range -2:2:81 --xprime 0.5 "
      "--t 0,-0.3 --out " +
      out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  const auto matrix = greenprop::read_sweep_matrix(in);
  REQUIRE(matrix.row_values.size() == 81);
  // |K(x, 0.5)| is smooth except for a derivative kink at x = 0; the discrete
  // curvature there towers over the ambient level.
  std::vector<double> mag(81);
  for (int i = 0; i < 81; ++i) mag[i] = std::abs(matrix.cells[i]);
  double peak = -1.0;
  int at = -1;
  std::vector<double> d2(79);
  for (int i = 1; i < 80; ++i) {
    d2[i - 1] = std::abs(mag[i + 1] - 2.0 * mag[i] + mag[i - 1]);
    if (d2[i - 1] > peak) {
      peak = d2[i - 1];
      at = i;
    }
  }
  CHECK(matrix.row_values[at] == doctest::Approx(0.0).epsilon(1e-12));
  std::nth_element(d2.begin(), d2.begin() + 39, d2.end());
  CHECK(peak > 5.0 * d2[39]);
}

TEST_CASE("validate passes and reruns reproducibly modulo runtimes") {
  const auto first = run_tool("validate --seed 11", kPinnedClock);
  const auto second = run_tool("validate --seed 11", kPinnedClock);
  REQUIRE(first.exit_code == 0);
  REQUIRE(second.exit_code == 0);
  auto a = nlohmann::json::parse(first.out);
  auto b = nlohmann::json::parse(second.out);
  REQUIRE(a["properties"].size() == 6);
  CHECK(a["all_pass"] == true);
  CHECK(a["manifest"]["seed"] == 11);
  for (auto* doc : {&a, &b}) {
    for (auto& p : (*doc)["properties"]) {
      CHECK(p["pass"] == true);
      CHECK(p["max_residual"].get<double>() < p["tolerance"].get<double>());
      p.erase("runtime_s");
    }
  }
  CHECK(a == b);
}

TEST_CASE("the tolerance override flips the verdict both ways") {
  CHECK(run_tool("validate --suite jump", "GREENPROP_TOL=1e-30").exit_code ==
        1);
  CHECK(run_tool("validate --suite jump", "GREENPROP_TOL=1.0").exit_code == 0);
  // A malformed override is an argument error, not a silent default.
  CHECK(run_tool("validate --suite jump", "GREENPROP_TOL=banana").exit_code ==
        2);
}

TEST_CASE("argument and failure classes map onto distinct exit codes") {
  CHECK(run_tool("greens --badflag").exit_code == 2);
  CHECK(run_tool("greens --potential free --x 0 --energy 1,0").exit_code ==
        2);  // missing --xprime
  CHECK(run_tool("sweep --x-range 3:1:10 --energy 1,0").exit_code == 2);
  CHECK(run_tool("sweep --x-range -1:1:5").exit_code == 2);  // no mode picked
  CHECK(run_tool("sweep --x-range -1:1:5 --energy 1,0 --t 1,0").exit_code ==
        2);  // both modes
  CHECK(run_tool("propagator --potential free --method closed --x 0 "
                 "--xprime 0 --t 0,0")
            .exit_code == 2);  // singular initial time
  CHECK(run_tool("propagator --potential harmonic --method closed --x 0 "
                 "--xprime 0 --t 3.14159265358979,0")
            .exit_code == 3);  // caustic
  CHECK(run_tool("propagator --potential harmonic --method spectral --x 0 "
                 "--xprime 0 --t 1,0")
            .exit_code == 4);  // undamped series cannot converge
  CHECK(run_tool("propagator --potential custom --method closed --x 0 "
                 "--xprime 0 --t 1,-0.1")
            .exit_code == 2);  // no closed kernel (and no file given)
}

TEST_CASE("records written to files round trip through the library reader") {
  const fs::path jsonl = scratch_dir() / "prop.jsonl";
  const auto r = run_tool(
      "propagator --potential harmonic --method closed --x 0.4 --xprime -0.3 "
      "--t 0.9,-0.1 --format jsonl --out " +
      jsonl.string(),
      kPinnedClock);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());  // everything went to the file
  std::ifstream in(jsonl);
  const auto file = greenprop::read_records(in);
  CHECK(file.kind == "propagator");
  CHECK(file.manifest.output_format == "jsonl");
  REQUIRE(file.props.size() == 1);
  CHECK(greenprop::to_string(file.props.front().method) == "closed_harmonic");
  CHECK(file.props.front().point.param == cplx{0.9, -0.1});
}

TEST_CASE("help names the public subcommands and hides the probe") {
  const auto r = run_tool("--help");
  CHECK(r.exit_code == 0);
  for (const char* name : {"greens", "propagator", "sweep", "validate"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
  CHECK(r.out.find("specfun-probe") == std::string::npos);
}

TEST_CASE("the hidden probe tabulates gamma to machine accuracy") {
  const auto r = run_tool("specfun-probe --function gamma --from 0.5 --to 4.5 "
                          "--n 5");
  REQUIRE(r.exit_code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);  // manifest
  CHECK(line.rfind("# manifest ", 0) == 0);
  std::getline(in, line);
  CHECK(line == "x,re,im,est_error");
  int rows = 0;
  while (std::getline(in, line)) {
    double x = 0, re = 0, im = 0, err = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg", &x, &re, &im, &err) ==
            4);
    CHECK(std::abs(re - std::tgamma(x)) < 1e-12 * std::tgamma(x));
    CHECK(std::abs(im) < 1e-14);
    ++rows;
  }
  CHECK(rows == 5);
}

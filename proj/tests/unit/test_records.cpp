#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "greenprop/errors.hpp"
#include "greenprop/records.hpp"

using greenprop::cplx;
using greenprop::GreenEval;
using greenprop::GreenMethod;
using greenprop::PropagatorEval;
using greenprop::PropagatorMethod;
using greenprop::RunManifest;
using greenprop::SweepMatrix;

namespace {

RunManifest sample_manifest(const std::string& format) {
  RunManifest m;
  m.command = "greens --potential free --x 0 --xprime 1 --energy 0.5,0";
  m.config_path = "";
  m.units.hbar = 1.0;
  m.units.mass = 1.0;
  m.potential = "free";
  m.output_format = format;
  m.seed = 42;
  m.timestamp = "2001-09-09T01:46:40Z";
  return m;
}

std::vector<GreenEval> sample_greens() {
  std::vector<GreenEval> records;
  GreenEval a;
  a.point = {0.0, 1.0, cplx(0.5, 0.0)};
  a.value = cplx(-std::sin(1.0), std::cos(1.0));
  a.method = GreenMethod::closed_free;
  a.est_error = 3.1e-16;
  records.push_back(a);
  GreenEval b;
  // Awkward doubles on purpose: the round-trip must be bit-exact.
  b.point = {0.1, -0.3, cplx(0.7234567891234567, 1e-17)};
  b.value = cplx(1.0 / 3.0, -2.0 / 7.0);
  b.method = GreenMethod::numerical_modes;
  b.est_error = 5.4321e-9;
  records.push_back(b);
  return records;
}

std::vector<PropagatorEval> sample_props() {
  std::vector<PropagatorEval> records;
  PropagatorEval a;
  a.point = {0.0, 0.0, cplx(1.0, 0.0)};
  a.value = cplx(0.28209479177387814, -0.28209479177387814);
  a.method = PropagatorMethod::closed_free;
  a.terms_used = 0;
  a.est_error = 2.2e-16;
  records.push_back(a);
  PropagatorEval b;
  b.point = {0.4, 0.1, cplx(0.0, -0.7)};
  b.value = cplx(0.123456789012345678, 0.0);
  b.method = PropagatorMethod::spectral_sum;
  b.terms_used = 61;
  b.est_error = 1.7e-10;
  records.push_back(b);
  return records;
}

}  // namespace

TEST_CASE("manifest JSON survives a round trip in both framings") {
  const RunManifest m = sample_manifest("csv");
  const std::string line = greenprop::manifest_json(m);
  const RunManifest back = greenprop::parse_manifest_json(line);
  CHECK(back.command == m.command);
  CHECK(back.units.hbar == m.units.hbar);
  CHECK(back.units.mass == m.units.mass);
  CHECK(back.potential == m.potential);
  CHECK(back.output_format == m.output_format);
  REQUIRE(back.seed.has_value());
  CHECK(*back.seed == 42);
  CHECK(back.timestamp == m.timestamp);

  // The comment framing used at the top of CSV artifacts parses too.
  const RunManifest commented =
      greenprop::parse_manifest_json("# manifest " + line);
  CHECK(commented.command == m.command);

  RunManifest unseeded = m;
  unseeded.seed.reset();
  const RunManifest back2 =
      greenprop::parse_manifest_json(greenprop::manifest_json(unseeded));
  CHECK_FALSE(back2.seed.has_value());

  CHECK_THROWS_AS(greenprop::parse_manifest_json("no json here"),
                  greenprop::ValidationError);
  CHECK_THROWS_AS(greenprop::parse_manifest_json("{\"command\": \"x\"}"),
                  greenprop::ValidationError);
}

TEST_CASE("timestamp honors the pinned-epoch convention") {
  setenv("SOURCE_DATE_EPOCH", "1000000000", 1);
  CHECK(greenprop::make_timestamp() == "2001-09-09T01:46:40Z");
  // Identical invocations must produce identical stamps.
  CHECK(greenprop::make_timestamp() == greenprop::make_timestamp());
  unsetenv("SOURCE_DATE_EPOCH");
}

TEST_CASE("green records: bit-exact CSV round trip and stable golden bytes") {
  const RunManifest m = sample_manifest("csv");
  const auto records = sample_greens();
  std::ostringstream out;
  greenprop::write_green_records(out, m, records);
  const std::string text = out.str();

  // Self-describing: manifest first, then the documented column set.
  CHECK(text.rfind("# manifest {", 0) == 0);
  CHECK(text.find("x,x_prime,re_E,im_E,re_G,im_G,method,est_error\n") !=
        std::string::npos);
  CHECK(text.find("closed_free") != std::string::npos);
  CHECK(text.find("numerical_modes") != std::string::npos);

  std::istringstream in(text);
  const auto file = greenprop::read_records(in);
  CHECK(file.kind == "greens");
  CHECK(file.manifest.command == m.command);
  REQUIRE(file.greens.size() == records.size());
  CHECK(file.props.empty());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(file.greens[i].point.x == records[i].point.x);
    CHECK(file.greens[i].point.x_prime == records[i].point.x_prime);
    CHECK(file.greens[i].point.param == records[i].point.param);
    CHECK(file.greens[i].value == records[i].value);
    CHECK(file.greens[i].method == records[i].method);
    CHECK(file.greens[i].est_error == records[i].est_error);
  }

  // Writing the same records twice yields byte-identical artifacts.
  std::ostringstream again;
  greenprop::write_green_records(again, m, records);
  CHECK(again.str() == text);
}

TEST_CASE("propagator records: bit-exact JSONL round trip") {
  const RunManifest m = sample_manifest("jsonl");
  const auto records = sample_props();
  std::ostringstream out;
  greenprop::write_prop_records(out, m, records);
  const std::string text = out.str();

  // First line is the manifest record; one JSON object per line after it.
  CHECK(text.rfind("{", 0) == 0);
  CHECK(text.find("\"record\":\"manifest\"") != std::string::npos);
  CHECK(text.find("\"record\":\"propagator\"") != std::string::npos);

  std::istringstream in(text);
  const auto file = greenprop::read_records(in);
  CHECK(file.kind == "propagator");
  REQUIRE(file.props.size() == records.size());
  CHECK(file.greens.empty());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(file.props[i].point.param == records[i].point.param);
    CHECK(file.props[i].value == records[i].value);
    CHECK(file.props[i].method == records[i].method);
    CHECK(file.props[i].terms_used == records[i].terms_used);
    CHECK(file.props[i].est_error == records[i].est_error);
  }

  std::ostringstream again;
  greenprop::write_prop_records(again, m, records);
  CHECK(again.str() == text);
}

TEST_CASE("record reader rejects malformed artifacts") {
  const auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return greenprop::read_records(in);
  };
  CHECK_THROWS_AS(parse(""), greenprop::ValidationError);
  CHECK_THROWS_AS(parse("x,y\n1,2\n"), greenprop::ValidationError);

  const RunManifest m = sample_manifest("csv");
  const std::string head = "# manifest " + greenprop::manifest_json(m) + "\n";
  CHECK_THROWS_AS(parse(head), greenprop::ValidationError);  // no header row
  CHECK_THROWS_AS(parse(head + "a,b,c\n"), greenprop::ValidationError);
  CHECK_THROWS_AS(
      parse(head + "x,x_prime,re_E,im_E,re_G,im_G,method,est_error\n" +
            "0,1,0.5,0,0,1,bogus_method,1e-16\n"),
      greenprop::ValidationError);
  CHECK_THROWS_AS(
      parse(head + "x,x_prime,re_E,im_E,re_G,im_G,method,est_error\n" +
            "0,1,0.5\n"),
      greenprop::ValidationError);
}

TEST_CASE("wavefunction snapshots rebuild the sampled state exactly") {
  const auto grid = greenprop::Grid1D::linear(-3.0, 3.0, 61);
  const auto state = greenprop::make_state(
      grid,
      [](double x) {
        return std::exp(cplx(0.0, 0.7 * x)) * std::exp(-3.0 * x * x);
      },
      1.25, true);
  RunManifest m = sample_manifest("csv");
  std::ostringstream out;
  greenprop::write_wavefunction_csv(out, m, state);
  const std::string text = out.str();
  CHECK(text.rfind("# manifest {", 0) == 0);
  CHECK(text.find("x,re_psi,im_psi,abs2\n") != std::string::npos);

  std::istringstream in(text);
  const auto back = greenprop::read_wavefunction_csv(in);
  CHECK(back.grid.n_points == grid.n_points);
  CHECK(back.grid.x_min == grid.x_min);
  CHECK(back.grid.x_max == grid.x_max);
  CHECK(back.time == state.time);
  REQUIRE(back.values.size() == state.values.size());
  for (std::size_t i = 0; i < state.values.size(); ++i) {
    CHECK(back.values[i] == state.values[i]);
  }
  CHECK(std::abs(back.norm - state.norm) < 1e-12);

  CHECK_THROWS_AS(
      [&] {
        std::istringstream bad("# manifest " + greenprop::manifest_json(m) +
                               "\nnot a grid line\n");
        return greenprop::read_wavefunction_csv(bad);
      }(),
      greenprop::ValidationError);
}

TEST_CASE("sweep matrices: blocks, flagged columns, and round trip") {
  SweepMatrix matrix;
  matrix.row_label = "x";
  matrix.col_label = "re_E";
  matrix.row_values = {-1.0, 0.0, 1.0};
  matrix.col_values = {0.25, 0.5, 0.75, 1.0};
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (j == 1) {
        matrix.cells.emplace_back(nan, nan);  // a "pole column"
      } else {
        matrix.cells.emplace_back(0.1 * static_cast<double>(i) +
                                      static_cast<double>(j),
                                  -0.5 * static_cast<double>(i));
      }
    }
  }
  RunManifest m = sample_manifest("csv");
  std::ostringstream out;
  greenprop::write_sweep_matrix(out, m, matrix);
  const std::string text = out.str();
  CHECK(text.find("# block re\n") != std::string::npos);
  CHECK(text.find("# block im\n") != std::string::npos);
  CHECK(text.find("# block abs\n") != std::string::npos);
  CHECK(text.find("x\\re_E,0.25,0.5,0.75,1\n") != std::string::npos);
  CHECK(text.find("# flagged_cols 1\n") != std::string::npos);

  std::istringstream in(text);
  const auto back = greenprop::read_sweep_matrix(in);
  CHECK(back.row_label == "x");
  CHECK(back.col_label == "re_E");
  CHECK(back.row_values == matrix.row_values);
  CHECK(back.col_values == matrix.col_values);
  REQUIRE(back.cells.size() == matrix.cells.size());
  for (std::size_t k = 0; k < matrix.cells.size(); ++k) {
    if (std::isnan(matrix.cells[k].real())) {
      CHECK(std::isnan(back.cells[k].real()));
    } else {
      CHECK(back.cells[k] == matrix.cells[k]);
    }
  }

  SweepMatrix bad = matrix;
  bad.cells.pop_back();
  std::ostringstream sink;
  CHECK_THROWS_AS(greenprop::write_sweep_matrix(sink, m, bad),
                  greenprop::ValidationError);
}

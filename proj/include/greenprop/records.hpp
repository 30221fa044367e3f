#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "greenprop/greens.hpp"
#include "greenprop/propagator.hpp"
#include "greenprop/tdse.hpp"
#include "greenprop/units.hpp"

namespace greenprop {

// Echo of one tool invocation, written at the top of every artifact so each
// output file is self-describing: a CSV artifact starts with a
// `# manifest {json}` comment line, a JSONL artifact with a manifest record.
struct RunManifest {
  std::string command;         // reconstructed invocation
  std::string config_path;     // empty when no config file was involved
  UnitsConfig units{};
  std::string potential;       // compact echo, e.g. "harmonic(omega=1)"
  std::string output_format = "csv";  // "csv" | "jsonl"
  std::optional<std::uint64_t> seed;
  std::string timestamp;       // UTC, from make_timestamp()
};

// ISO-8601 UTC wall-clock stamp. Honors SOURCE_DATE_EPOCH (seconds) when set,
// so identical invocations can produce byte-identical artifacts.
std::string make_timestamp();

// Single-line JSON object with deterministic key order, and its inverse.
// parse_manifest_json accepts either the bare object or a full
// `# manifest {...}` / manifest-record line. Malformed input raises
// ValidationError.
std::string manifest_json(const RunManifest& m);
RunManifest parse_manifest_json(const std::string& line);

// Record writers. Every floating-point field prints with enough digits to
// re-parse bit-identically; the format is taken from m.output_format.
// Columns (csv) / keys (jsonl):
//   greens:     x, x_prime, re_E, im_E, re_G, im_G, method, est_error
//   propagator: x, x_prime, re_t, im_t, re_K, im_K, method, terms_used,
//               est_error
void write_green_records(std::ostream& out, const RunManifest& m,
                         const std::vector<GreenEval>& records);
void write_prop_records(std::ostream& out, const RunManifest& m,
                        const std::vector<PropagatorEval>& records);

// Reader for the tool's own record artifacts, either format and either kind.
struct RecordsFile {
  RunManifest manifest;
  std::string kind;  // "greens" | "propagator"
  std::vector<GreenEval> greens;  // exactly one of the two is populated
  std::vector<PropagatorEval> props;
};
RecordsFile read_records(std::istream& in);

// Sampled-wavefunction snapshot: CSV columns x, re_psi, im_psi, abs2, plus
// grid/time metadata on comment lines so the reader can rebuild the state.
void write_wavefunction_csv(std::ostream& out, const RunManifest& m,
                            const WavefunctionState& state);
WavefunctionState read_wavefunction_csv(std::istream& in);

// Dense sweep output: three gnuplot-ready matrix blocks (re, im, abs), each
// with the column axis as its first row and the row axis as the leading
// entry of every data row. NaN cells mark evaluations that raised a
// numerical failure (e.g. energy poles); any column containing one is listed
// on a trailing `# flagged_cols` comment.
struct SweepMatrix {
  std::string row_label;  // e.g. "x"
  std::string col_label;  // e.g. "x_prime", "re_t", "re_E"
  std::vector<double> row_values;
  std::vector<double> col_values;
  std::vector<cplx> cells;  // row-major, rows * cols entries
};
void write_sweep_matrix(std::ostream& out, const RunManifest& m,
                        const SweepMatrix& matrix);
SweepMatrix read_sweep_matrix(std::istream& in);

}  // namespace greenprop

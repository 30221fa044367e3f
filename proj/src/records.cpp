#include "greenprop/records.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "greenprop/errors.hpp"

namespace greenprop {

namespace {

using nlohmann::json;

// Shortest representation that still re-parses to the identical double.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json manifest_to_json(const RunManifest& m) {
  json j;
  j["command"] = m.command;
  j["config_path"] = m.config_path;
  j["units"] = {{"hbar", m.units.hbar}, {"mass", m.units.mass}};
  j["potential"] = m.potential;
  j["format"] = m.output_format;
  if (m.seed.has_value()) {
    j["seed"] = *m.seed;
  } else {
    j["seed"] = nullptr;
  }
  j["timestamp"] = m.timestamp;
  return j;
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.command = j.at("command").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.units.hbar = j.at("units").at("hbar").get<double>();
    m.units.mass = j.at("units").at("mass").get<double>();
    m.potential = j.at("potential").get<std::string>();
    m.output_format = j.at("format").get<std::string>();
    if (!j.at("seed").is_null()) {
      m.seed = j.at("seed").get<std::uint64_t>();
    }
    m.timestamp = j.at("timestamp").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest is missing fields: ") +
                          e.what());
  }
  return m;
}

GreenMethod green_method_from_string(const std::string& s) {
  if (s == "closed_free") return GreenMethod::closed_free;
  if (s == "closed_harmonic") return GreenMethod::closed_harmonic;
  if (s == "delta_dressed") return GreenMethod::delta_dressed;
  if (s == "numerical_modes") return GreenMethod::numerical_modes;
  throw ValidationError("unknown green-function method tag: " + s);
}

PropagatorMethod prop_method_from_string(const std::string& s) {
  if (s == "closed_free") return PropagatorMethod::closed_free;
  if (s == "closed_delta") return PropagatorMethod::closed_delta;
  if (s == "closed_harmonic") return PropagatorMethod::closed_harmonic;
  if (s == "spectral_sum") return PropagatorMethod::spectral_sum;
  if (s == "inverse_laplace") return PropagatorMethod::inverse_laplace;
  throw ValidationError("unknown propagator method tag: " + s);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) {
    throw ValidationError("malformed numeric field: '" + s + "'");
  }
  return v;
}

// First line of any artifact -> its manifest, independent of format.
RunManifest read_manifest_line(std::istream& in, std::string* first_line) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ValidationError("artifact is empty: no manifest line");
  }
  if (first_line != nullptr) {
    *first_line = line;
  }
  return parse_manifest_json(line);
}

}  // namespace

std::string make_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long pinned = std::strtoll(epoch, &end, 10);
    if (end != epoch && *end == '\0') {
      now = static_cast<std::time_t>(pinned);
    }
  }
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string manifest_json(const RunManifest& m) {
  return manifest_to_json(m).dump();
}

RunManifest parse_manifest_json(const std::string& line) {
  std::string body = line;
  if (const auto brace = body.find('{'); brace == std::string::npos) {
    throw ValidationError("manifest line holds no JSON object");
  } else {
    body = body.substr(brace);
  }
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed manifest JSON: ") + e.what());
  }
  // JSONL artifacts wrap the manifest as a typed record.
  if (j.contains("record")) {
    if (j.at("record") != "manifest") {
      throw ValidationError("first record of a JSONL artifact must be the "
                            "manifest");
    }
    j.erase("record");
  }
  return manifest_from_json(j);
}

void write_green_records(std::ostream& out, const RunManifest& m,
                         const std::vector<GreenEval>& records) {
  if (m.output_format == "csv") {
    out << "# manifest " << manifest_json(m) << '\n';
    out << "x,x_prime,re_E,im_E,re_G,im_G,method,est_error\n";
    for (const GreenEval& r : records) {
      out << fmt(r.point.x) << ',' << fmt(r.point.x_prime) << ','
          << fmt(r.point.param.real()) << ',' << fmt(r.point.param.imag())
          << ',' << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ','
          << to_string(r.method) << ',' << fmt(r.est_error) << '\n';
    }
  } else if (m.output_format == "jsonl") {
    json man = manifest_to_json(m);
    man["record"] = "manifest";
    out << man.dump() << '\n';
    for (const GreenEval& r : records) {
      json j;
      j["record"] = "green";
      j["x"] = r.point.x;
      j["x_prime"] = r.point.x_prime;
      j["re_E"] = r.point.param.real();
      j["im_E"] = r.point.param.imag();
      j["re_G"] = r.value.real();
      j["im_G"] = r.value.imag();
      j["method"] = to_string(r.method);
      j["est_error"] = r.est_error;
      out << j.dump() << '\n';
    }
  } else {
    throw ValidationError("unknown output format: " + m.output_format);
  }
}

void write_prop_records(std::ostream& out, const RunManifest& m,
                        const std::vector<PropagatorEval>& records) {
  if (m.output_format == "csv") {
    out << "# manifest " << manifest_json(m) << '\n';
    out << "x,x_prime,re_t,im_t,re_K,im_K,method,terms_used,est_error\n";
    for (const PropagatorEval& r : records) {
      out << fmt(r.point.x) << ',' << fmt(r.point.x_prime) << ','
          << fmt(r.point.param.real()) << ',' << fmt(r.point.param.imag())
          << ',' << fmt(r.value.real()) << ',' << fmt(r.value.imag()) << ','
          << to_string(r.method) << ',' << r.terms_used << ','
          << fmt(r.est_error) << '\n';
    }
  } else if (m.output_format == "jsonl") {
    json man = manifest_to_json(m);
    man["record"] = "manifest";
    out << man.dump() << '\n';
    for (const PropagatorEval& r : records) {
      json j;
      j["record"] = "propagator";
      j["x"] = r.point.x;
      j["x_prime"] = r.point.x_prime;
      j["re_t"] = r.point.param.real();
      j["im_t"] = r.point.param.imag();
      j["re_K"] = r.value.real();
      j["im_K"] = r.value.imag();
      j["method"] = to_string(r.method);
      j["terms_used"] = r.terms_used;
      j["est_error"] = r.est_error;
      out << j.dump() << '\n';
    }
  } else {
    throw ValidationError("unknown output format: " + m.output_format);
  }
}

RecordsFile read_records(std::istream& in) {
  RecordsFile file;
  std::string first;
  file.manifest = read_manifest_line(in, &first);
  const bool jsonl = first.rfind("# manifest", 0) != 0;

  std::string line;
  if (!jsonl) {
    // CSV: the header row names the columns and identifies the record kind.
    if (!std::getline(in, line)) {
      throw ValidationError("record CSV ends before its header row");
    }
    const auto header = split_csv(line);
    if (header.size() >= 8 && header[2] == "re_E") {
      file.kind = "greens";
    } else if (header.size() >= 9 && header[2] == "re_t") {
      file.kind = "propagator";
    } else {
      throw ValidationError("unrecognized record CSV header: " + line);
    }
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') {
        continue;
      }
      const auto f = split_csv(line);
      if (file.kind == "greens") {
        if (f.size() != 8) {
          throw ValidationError("green record row needs 8 fields: " + line);
        }
        GreenEval r;
        r.point = {parse_double(f[0]), parse_double(f[1]),
                   cplx(parse_double(f[2]), parse_double(f[3]))};
        r.value = cplx(parse_double(f[4]), parse_double(f[5]));
        r.method = green_method_from_string(f[6]);
        r.est_error = parse_double(f[7]);
        file.greens.push_back(r);
      } else {
        if (f.size() != 9) {
          throw ValidationError("propagator record row needs 9 fields: " +
                                line);
        }
        PropagatorEval r;
        r.point = {parse_double(f[0]), parse_double(f[1]),
                   cplx(parse_double(f[2]), parse_double(f[3]))};
        r.value = cplx(parse_double(f[4]), parse_double(f[5]));
        r.method = prop_method_from_string(f[6]);
        r.terms_used = static_cast<int>(parse_double(f[7]));
        r.est_error = parse_double(f[8]);
        file.props.push_back(r);
      }
    }
    return file;
  }

  // JSONL: typed records after the manifest.
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed JSONL record: ") + e.what());
    }
    const std::string kind = j.value("record", "");
    try {
      if (kind == "green") {
        GreenEval r;
        r.point = {j.at("x").get<double>(), j.at("x_prime").get<double>(),
                   cplx(j.at("re_E").get<double>(), j.at("im_E").get<double>())};
        r.value = cplx(j.at("re_G").get<double>(), j.at("im_G").get<double>());
        r.method = green_method_from_string(j.at("method").get<std::string>());
        r.est_error = j.at("est_error").get<double>();
        file.greens.push_back(r);
      } else if (kind == "propagator") {
        PropagatorEval r;
        r.point = {j.at("x").get<double>(), j.at("x_prime").get<double>(),
                   cplx(j.at("re_t").get<double>(), j.at("im_t").get<double>())};
        r.value = cplx(j.at("re_K").get<double>(), j.at("im_K").get<double>());
        r.method = prop_method_from_string(j.at("method").get<std::string>());
        r.terms_used = j.at("terms_used").get<int>();
        r.est_error = j.at("est_error").get<double>();
        file.props.push_back(r);
      } else {
        throw ValidationError("unknown JSONL record type: '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ValidationError(std::string("JSONL record is missing fields: ") +
                            e.what());
    }
  }
  if (!file.greens.empty() && !file.props.empty()) {
    throw ValidationError("artifact mixes green and propagator records");
  }
  file.kind = file.props.empty() ? "greens" : "propagator";
  return file;
}

void write_wavefunction_csv(std::ostream& out, const RunManifest& m,
                            const WavefunctionState& state) {
  out << "# manifest " << manifest_json(m) << '\n';
  out << "# grid " << fmt(state.grid.x_min) << ' ' << fmt(state.grid.x_max)
      << ' ' << state.grid.n_points << " time " << fmt(state.time) << '\n';
  out << "x,re_psi,im_psi,abs2\n";
  for (int i = 0; i < state.grid.n_points; ++i) {
    const cplx v = state.values[static_cast<std::size_t>(i)];
    out << fmt(state.grid.node(i)) << ',' << fmt(v.real()) << ','
        << fmt(v.imag()) << ',' << fmt(std::norm(v)) << '\n';
  }
}

WavefunctionState read_wavefunction_csv(std::istream& in) {
  std::string line;
  read_manifest_line(in, nullptr);
  if (!std::getline(in, line) || line.rfind("# grid ", 0) != 0) {
    throw ValidationError("snapshot lacks its '# grid' line");
  }
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;
  double time = 0.0;
  {
    std::istringstream meta(line.substr(7));
    std::string word;
    if (!(meta >> x_min >> x_max >> n_points >> word >> time) ||
        word != "time") {
      throw ValidationError("malformed snapshot grid line: " + line);
    }
  }
  if (!std::getline(in, line) || line != "x,re_psi,im_psi,abs2") {
    throw ValidationError("snapshot lacks its column header");
  }
  WavefunctionState state;
  state.grid = Grid1D::linear(x_min, x_max, n_points);
  state.time = time;
  state.values.reserve(static_cast<std::size_t>(n_points));
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto f = split_csv(line);
    if (f.size() != 4) {
      throw ValidationError("snapshot row needs 4 fields: " + line);
    }
    state.values.emplace_back(parse_double(f[1]), parse_double(f[2]));
  }
  if (state.values.size() != static_cast<std::size_t>(n_points)) {
    throw ValidationError("snapshot row count disagrees with its grid");
  }
  state.norm = state_norm(state);
  return state;
}

void write_sweep_matrix(std::ostream& out, const RunManifest& m,
                        const SweepMatrix& matrix) {
  const std::size_t rows = matrix.row_values.size();
  const std::size_t cols = matrix.col_values.size();
  if (matrix.cells.size() != rows * cols || rows == 0 || cols == 0) {
    throw ValidationError("sweep matrix shape disagrees with its axes");
  }
  out << "# manifest " << manifest_json(m) << '\n';
  out << "# rows " << matrix.row_label << " cols " << matrix.col_label << '\n';
  const auto block = [&](const char* name, auto&& component) {
    out << "# block " << name << '\n';
    out << matrix.row_label << '\\' << matrix.col_label;
    for (const double c : matrix.col_values) {
      out << ',' << fmt(c);
    }
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
      out << fmt(matrix.row_values[i]);
      for (std::size_t j = 0; j < cols; ++j) {
        out << ',' << fmt(component(matrix.cells[i * cols + j]));
      }
      out << '\n';
    }
  };
  block("re", [](cplx v) { return v.real(); });
  block("im", [](cplx v) { return v.imag(); });
  block("abs", [](cplx v) { return std::abs(v); });

  std::vector<std::size_t> flagged;
  for (std::size_t j = 0; j < cols; ++j) {
    for (std::size_t i = 0; i < rows; ++i) {
      if (std::isnan(matrix.cells[i * cols + j].real()) ||
          std::isnan(matrix.cells[i * cols + j].imag())) {
        flagged.push_back(j);
        break;
      }
    }
  }
  if (!flagged.empty()) {
    out << "# flagged_cols";
    for (const std::size_t j : flagged) {
      out << ' ' << j;
    }
    out << '\n';
  }
}

SweepMatrix read_sweep_matrix(std::istream& in) {
  std::string line;
  read_manifest_line(in, nullptr);
  if (!std::getline(in, line) || line.rfind("# rows ", 0) != 0) {
    throw ValidationError("sweep artifact lacks its '# rows' line");
  }
  SweepMatrix matrix;
  {
    std::istringstream meta(line.substr(2));
    std::string rows_word;
    std::string cols_word;
    if (!(meta >> rows_word >> matrix.row_label >> cols_word >>
          matrix.col_label) ||
        rows_word != "rows" || cols_word != "cols") {
      throw ValidationError("malformed sweep axis line: " + line);
    }
  }
  // Parse the three blocks; re/im fill the cells, abs is validated implicitly
  // by shape (its values are derivable and not stored).
  std::vector<double> re;
  std::vector<double> im;
  std::size_t rows = 0;
  std::string current;
  while (std::getline(in, line)) {
    if (line.rfind("# block ", 0) == 0) {
      current = line.substr(8);
      rows = 0;
      continue;
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    const auto f = split_csv(line);
    if (!f.empty() && f[0].find('\\') != std::string::npos) {
      if (current == "re") {
        for (std::size_t j = 1; j < f.size(); ++j) {
          matrix.col_values.push_back(parse_double(f[j]));
        }
      }
      continue;
    }
    if (f.size() != matrix.col_values.size() + 1) {
      throw ValidationError("sweep row width disagrees with its axis: " + line);
    }
    if (current == "re") {
      matrix.row_values.push_back(parse_double(f[0]));
      for (std::size_t j = 1; j < f.size(); ++j) {
        re.push_back(parse_double(f[j]));
      }
    } else if (current == "im") {
      ++rows;
      for (std::size_t j = 1; j < f.size(); ++j) {
        im.push_back(parse_double(f[j]));
      }
    }
  }
  if (re.size() != matrix.row_values.size() * matrix.col_values.size() ||
      im.size() != re.size()) {
    throw ValidationError("sweep blocks are incomplete or inconsistent");
  }
  matrix.cells.reserve(re.size());
  for (std::size_t k = 0; k < re.size(); ++k) {
    matrix.cells.emplace_back(re[k], im[k]);
  }
  return matrix;
}

}  // namespace greenprop

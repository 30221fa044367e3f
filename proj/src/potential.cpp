#include "greenprop/potential.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace greenprop {

// ---------------------------------------------------------------------------
// Grid1D

Grid1D Grid1D::linear(double x_min, double x_max, int n_points) {
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw ValidationError("Grid1D: require finite x_min < x_max");
  }
  if (n_points < 2) {
    throw ValidationError("Grid1D: n_points must be >= 2");
  }
  Grid1D g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_points = n_points;
  g.spacing = (x_max - x_min) / static_cast<double>(n_points - 1);
  return g;
}

// ---------------------------------------------------------------------------
// Custom sample table with piecewise-cubic Hermite interpolation (C^1).

struct PotentialModel::CustomTable {
  std::vector<double> xs;
  std::vector<double> vs;
  std::vector<double> slopes;  // dV/dx at nodes (three-point formulas)
  int order = 3;

  // Index of the cell containing x (clamped to valid cells).
  int cell(double x) const {
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    int i = static_cast<int>(it - xs.begin()) - 1;
    return std::clamp(i, 0, static_cast<int>(xs.size()) - 2);
  }

  double value(double x) const {
    const int i = cell(x);
    const double h = xs[i + 1] - xs[i];
    const double u = (x - xs[i]) / h;
    if (order == 1) return vs[i] * (1.0 - u) + vs[i + 1] * u;
    // Cubic Hermite basis on [0,1].
    const double u2 = u * u, u3 = u2 * u;
    const double h00 = 2 * u3 - 3 * u2 + 1;
    const double h10 = u3 - 2 * u2 + u;
    const double h01 = -2 * u3 + 3 * u2;
    const double h11 = u3 - u2;
    return h00 * vs[i] + h10 * h * slopes[i] + h01 * vs[i + 1] +
           h11 * h * slopes[i + 1];
  }

  double derivative(double x) const {
    const int i = cell(x);
    const double h = xs[i + 1] - xs[i];
    const double u = (x - xs[i]) / h;
    if (order == 1) return (vs[i + 1] - vs[i]) / h;
    const double u2 = u * u;
    const double d00 = (6 * u2 - 6 * u) / h;
    const double d10 = 3 * u2 - 4 * u + 1;
    const double d01 = (-6 * u2 + 6 * u) / h;
    const double d11 = 3 * u2 - 2 * u;
    return d00 * vs[i] + d10 * slopes[i] + d01 * vs[i + 1] + d11 * slopes[i + 1];
  }
};

namespace {

std::vector<double> hermite_slopes(const std::vector<double>& xs,
                                   const std::vector<double>& vs) {
  const std::size_t n = xs.size();
  std::vector<double> m(n, 0.0);
  if (n == 2) {
    m[0] = m[1] = (vs[1] - vs[0]) / (xs[1] - xs[0]);
    return m;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // Three-point (parabolic) slope on a possibly nonuniform grid.
    const double hl = xs[i] - xs[i - 1];
    const double hr = xs[i + 1] - xs[i];
    m[i] = (vs[i + 1] * hl * hl + vs[i] * (hr * hr - hl * hl) -
            vs[i - 1] * hr * hr) /
           (hl * hr * (hl + hr));
  }
  // One-sided second-order ends.
  {
    const double h0 = xs[1] - xs[0], h1 = xs[2] - xs[1];
    m[0] = -(2 * h0 + h1) / (h0 * (h0 + h1)) * vs[0] +
           (h0 + h1) / (h0 * h1) * vs[1] - h0 / (h1 * (h0 + h1)) * vs[2];
    const double g1 = xs[n - 2] - xs[n - 3], g0 = xs[n - 1] - xs[n - 2];
    m[n - 1] = (2 * g0 + g1) / (g0 * (g0 + g1)) * vs[n - 1] -
               (g0 + g1) / (g0 * g1) * vs[n - 2] +
               g0 / (g1 * (g0 + g1)) * vs[n - 3];
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories

PotentialModel PotentialModel::free_particle() {
  PotentialModel m;
  m.kind_ = Kind::Free;
  return m;
}

PotentialModel PotentialModel::harmonic(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ValidationError("PotentialModel::harmonic: omega must be > 0");
  }
  PotentialModel m;
  m.kind_ = Kind::Harmonic;
  m.omega_ = omega;
  return m;
}

PotentialModel PotentialModel::delta(double b) {
  return delta(b, free_particle());
}

PotentialModel PotentialModel::delta(double b, PotentialModel background) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw ValidationError(
        "PotentialModel::delta: strength b must be > 0 (repulsive point "
        "interaction; attractive couplings are out of scope)");
  }
  if (background.kind_ == Kind::Delta) {
    throw ValidationError("PotentialModel::delta: nested delta backgrounds are not supported");
  }
  PotentialModel m;
  m.kind_ = Kind::Delta;
  m.b_ = b;
  m.background_ = std::make_shared<const PotentialModel>(std::move(background));
  return m;
}

PotentialModel PotentialModel::custom(std::vector<double> xs, std::vector<double> vs,
                                      int interpolation_order) {
  if (xs.size() != vs.size()) {
    throw ValidationError("PotentialModel::custom: xs and vs size mismatch");
  }
  if (xs.size() < 2) {
    throw ValidationError("PotentialModel::custom: need at least 2 samples");
  }
  if (interpolation_order != 1 && interpolation_order != 3) {
    throw ValidationError("PotentialModel::custom: interpolation order must be 1 or 3");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(vs[i])) {
      throw ValidationError("PotentialModel::custom: non-finite sample");
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw ValidationError("PotentialModel::custom: xs must be strictly increasing");
    }
  }
  auto table = std::make_shared<CustomTable>();
  table->slopes = hermite_slopes(xs, vs);
  table->xs = std::move(xs);
  table->vs = std::move(vs);
  table->order = interpolation_order;
  PotentialModel m;
  m.kind_ = Kind::Custom;
  m.table_ = std::move(table);
  return m;
}

double PotentialModel::omega() const {
  if (kind_ != Kind::Harmonic) throw ValidationError("omega(): not a harmonic model");
  return omega_;
}

double PotentialModel::delta_strength() const {
  if (kind_ != Kind::Delta) throw ValidationError("delta_strength(): not a delta model");
  return b_;
}

const PotentialModel& PotentialModel::background() const {
  if (kind_ != Kind::Delta) throw ValidationError("background(): not a delta model");
  return *background_;
}

double PotentialModel::custom_x_min() const {
  if (kind_ != Kind::Custom) throw ValidationError("custom_x_min(): not a custom model");
  return table_->xs.front();
}

double PotentialModel::custom_x_max() const {
  if (kind_ != Kind::Custom) throw ValidationError("custom_x_max(): not a custom model");
  return table_->xs.back();
}

std::string PotentialModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Free:
      os << "free";
      break;
    case Kind::Harmonic:
      os << "harmonic(omega=" << omega_ << ")";
      break;
    case Kind::Delta:
      os << "delta(b=" << b_ << ", background=" << background_->describe() << ")";
      break;
    case Kind::Custom:
      os << "custom(" << table_->xs.size() << " samples on [" << table_->xs.front()
         << ", " << table_->xs.back() << "], order=" << table_->order << ")";
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Evaluation

double potential_value(const PotentialModel& model, double x, const UnitsConfig& units) {
  if (!std::isfinite(x)) throw ValidationError("potential_value: x must be finite");
  switch (model.kind_) {
    case PotentialModel::Kind::Free:
      return 0.0;
    case PotentialModel::Kind::Harmonic:
      return 0.5 * units.mass * model.omega_ * model.omega_ * x * x;
    case PotentialModel::Kind::Delta:
      // Regular part only; the point interaction itself is handled analytically.
      return potential_value(*model.background_, x, units);
    case PotentialModel::Kind::Custom: {
      const auto& t = *model.table_;
      if (x < t.xs.front() || x > t.xs.back()) {
        throw ValidationError("potential_value: x outside custom sample range");
      }
      return t.value(x);
    }
  }
  throw ValidationError("potential_value: unknown model kind");
}

double potential_derivative(const PotentialModel& model, double x, const UnitsConfig& units) {
  if (!std::isfinite(x)) throw ValidationError("potential_derivative: x must be finite");
  switch (model.kind_) {
    case PotentialModel::Kind::Free:
      return 0.0;
    case PotentialModel::Kind::Harmonic:
      return units.mass * model.omega_ * model.omega_ * x;
    case PotentialModel::Kind::Delta:
      return potential_derivative(*model.background_, x, units);
    case PotentialModel::Kind::Custom: {
      const auto& t = *model.table_;
      if (x < t.xs.front() || x > t.xs.back()) {
        throw ValidationError("potential_derivative: x outside custom sample range");
      }
      return t.derivative(x);
    }
  }
  throw ValidationError("potential_derivative: unknown model kind");
}

// ---------------------------------------------------------------------------
// File loading

PotentialModel load_custom_csv(const std::string& path, int interpolation_order) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_custom_csv: cannot open '" + path + "'");
  std::vector<double> xs, vs;
  std::string line;
  bool maybe_header = true;
  while (std::getline(in, line)) {
    // Strip comments and whitespace-only lines.
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x, v;
    if (ls >> x >> v) {
      xs.push_back(x);
      vs.push_back(v);
      maybe_header = false;
    } else if (maybe_header) {
      maybe_header = false;  // tolerate one textual header row
    } else {
      throw ValidationError("load_custom_csv: malformed line '" + line + "'");
    }
  }
  if (xs.size() < 2) throw ValidationError("load_custom_csv: fewer than 2 samples in '" + path + "'");
  return PotentialModel::custom(std::move(xs), std::move(vs), interpolation_order);
}

namespace {

// Minimal INI-style reader: section -> (key -> value), '#' or ';' comments.
std::map<std::string, std::map<std::string, std::string>> read_sections(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("load_potential_config: cannot open '" + path + "'");
  std::map<std::string, std::map<std::string, std::string>> sections;
  std::string line, section;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    const auto b = s.find_last_not_of(" \t\r\n");
    return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    if (auto pos = line.find_first_of("#;"); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ValidationError("load_potential_config: expected key = value, got '" + line + "'");
    }
    sections[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double d = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return d;
  } catch (const std::exception&) {
    throw ValidationError("load_potential_config: bad numeric value for '" + key +
                          "': '" + value + "'");
  }
}

}  // namespace

PotentialConfig load_potential_config(const std::string& path) {
  const auto sections = read_sections(path);
  PotentialConfig cfg;

  if (auto it = sections.find("units"); it != sections.end()) {
    double hbar = 1.0, mass = 1.0;
    for (const auto& [k, v] : it->second) {
      if (k == "hbar") hbar = to_double(k, v);
      else if (k == "mass") mass = to_double(k, v);
      else throw ValidationError("load_potential_config: unknown [units] key '" + k + "'");
    }
    cfg.units = make_units(hbar, mass);
  }

  auto pit = sections.find("potential");
  if (pit == sections.end()) {
    throw ValidationError("load_potential_config: missing [potential] section in '" + path + "'");
  }
  const auto& kv = pit->second;
  auto get = [&](const std::string& key) -> const std::string* {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  const std::string* type = get("type");
  if (!type) throw ValidationError("load_potential_config: [potential] needs 'type'");

  auto resolve = [&](const std::string& rel) {
    std::filesystem::path p(rel);
    if (p.is_absolute()) return p.string();
    return (std::filesystem::path(path).parent_path() / p).string();
  };

  if (*type == "free") {
    cfg.model = PotentialModel::free_particle();
  } else if (*type == "harmonic") {
    const std::string* omega = get("omega");
    if (!omega) throw ValidationError("load_potential_config: harmonic needs 'omega'");
    cfg.model = PotentialModel::harmonic(to_double("omega", *omega));
  } else if (*type == "delta") {
    const std::string* b = get("b");
    if (!b) throw ValidationError("load_potential_config: delta needs 'b'");
    PotentialModel background = PotentialModel::free_particle();
    if (const std::string* bg = get("background"); bg && *bg != "free") {
      if (*bg == "harmonic") {
        const std::string* omega = get("omega");
        if (!omega) throw ValidationError("load_potential_config: harmonic background needs 'omega'");
        background = PotentialModel::harmonic(to_double("omega", *omega));
      } else {
        throw ValidationError("load_potential_config: unknown delta background '" + *bg + "'");
      }
    }
    cfg.model = PotentialModel::delta(to_double("b", *b), std::move(background));
  } else if (*type == "custom") {
    const std::string* file = get("file");
    if (!file) throw ValidationError("load_potential_config: custom needs 'file'");
    int order = 3;
    if (const std::string* o = get("order")) order = static_cast<int>(to_double("order", *o));
    cfg.model = load_custom_csv(resolve(*file), order);
  } else {
    throw ValidationError("load_potential_config: unknown potential type '" + *type + "'");
  }
  return cfg;
}

}  // namespace greenprop

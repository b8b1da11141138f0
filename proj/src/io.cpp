#include "bsb/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "bsb/errors.hpp"
#include "json.hpp"

namespace bsb::io {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& text, int line) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    std::ostringstream os;
    os << "line " << line << ": value of '" << key << "' is not a number: '" << text << "'";
    throw Error(ErrorCode::ConfigError, os.str());
  }
  return v;
}

nlohmann::ordered_json number(double v) {
  // Round-trip text for finite values; non-finite values become strings.
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

StructureConfig parse_config(std::istream& in) {
  static const std::array<const char*, 7> keys = {"l0", "l1", "l2", "l3", "rho1", "rho2", "beta"};
  std::map<std::string, double> values;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": expected 'key = value'");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
    if (values.count(key)) {
      throw Error(ErrorCode::ConfigError, "line " + std::to_string(line) + ": duplicate key '" + key + "'");
    }
    values[key] = parse_number(key, value, line);
  }
  for (const char* k : keys) {
    if (!values.count(k)) throw Error(ErrorCode::ConfigError, std::string("missing key '") + k + "'");
  }
  StructureConfig cfg;
  cfg.l0 = values["l0"];
  cfg.l1 = values["l1"];
  cfg.l2 = values["l2"];
  cfg.l3 = values["l3"];
  cfg.rho1 = values["rho1"];
  cfg.rho2 = values["rho2"];
  cfg.beta = values["beta"];
  return validate_config(cfg);
}

StructureConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config file " + path.string());
  return parse_config(in);
}

std::string format_double(double v) {
  std::array<char, 40> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

void write_energy_csv(std::ostream& out, const EnergyTrace& trace) {
  out << "t,E,dissipation,F\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out << format_double(trace.times[k]) << ',' << format_double(trace.E[k]) << ','
        << format_double(trace.Ddiss[k]) << ',' << format_double(trace.F[k]) << '\n';
  }
}

void write_snapshots_csv(std::ostream& out, const Mesh& mesh, const DofMap& dofs,
                         const std::vector<Snapshot>& snapshots, int points) {
  if (points < 2) throw Error(ErrorCode::NonpositiveParameter, "snapshot grid needs at least 2 points");
  const double a = mesh.left(Component::Beam1), b = mesh.right(Component::Beam2);
  out << "t,x,displacement,velocity\n";
  for (const auto& s : snapshots) {
    for (int k = 0; k < points; ++k) {
      const double x = k == points - 1 ? b : a + (b - a) * k / (points - 1);
      const PointValue v = evaluate_state(mesh, dofs, s.state, x);
      out << format_double(s.time) << ',' << format_double(x) << ',' << format_double(v.displacement) << ','
          << format_double(v.velocity) << '\n';
    }
  }
}

void write_spectrum_csv(std::ostream& out, const SpectrumReport& report) {
  out << "re,im\n";
  for (const auto& mu : report.eigenvalues) out << format_double(mu.real()) << ',' << format_double(mu.imag()) << '\n';
}

void write_resolvent_csv(std::ostream& out, const ResolventTable& table) {
  out << "lambda,norm\n";
  for (std::size_t k = 0; k < table.lambdas.size(); ++k) {
    out << format_double(table.lambdas[k]) << ',' << format_double(table.norms[k]) << '\n';
  }
}

void write_matrix_coo(std::ostream& out, const Eigen::MatrixXd& A) {
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      if (A(i, j) != 0.0) out << i << ' ' << j << ' ' << format_double(A(i, j)) << '\n';
}

std::string report_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(r.regime));
  j["abscissa"] = number(r.abscissa);
  j["min_distance_to_imaginary_axis"] = number(r.min_distance_to_imaginary_axis);
  if (r.slowest) {
    j["slowest_re"] = number(r.slowest->real());
    j["slowest_im"] = number(r.slowest->imag());
  }
  j["alpha_fit"] = number(r.alpha_fit);
  j["ratio"] = number(r.ratio);
  j["ratio_discrete"] = number(r.ratio_discrete);
  j["slowest_step_product"] = number(r.slowest_step_product);
  j["time_resolved"] = r.time_resolved;
  if (r.fit) {
    j["fit_r_squared"] = number(r.fit->r_squared);
    j["fit_log_c"] = number(r.fit->logC);
    j["fit_window_start"] = number(r.fit->window.first);
    j["fit_window_end"] = number(r.fit->window.second);
  }
  j["defective_fit"] = r.defective_fit;
  j["dt"] = number(r.dt);
  j["t_final"] = number(r.t_final);
  j["all_pass"] = r.all_pass();
  j["notes"] = r.notes;
  auto& arr = j["invariant_results"] = nlohmann::ordered_json::array();
  for (const auto& inv : r.invariant_results) {
    nlohmann::ordered_json e;
    e["name"] = inv.name;
    e["pass"] = inv.pass;
    e["residual"] = number(inv.residual);
    if (!inv.note.empty()) e["note"] = inv.note;
    arr.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

std::string decay_json(const DecayFit& fit, double abscissa, DampingCase regime) {
  nlohmann::ordered_json j;
  j["regime"] = std::string(to_string(regime));
  j["alpha"] = number(fit.alpha);
  j["log_c"] = number(fit.logC);
  j["r_squared"] = number(fit.r_squared);
  j["window_start"] = number(fit.window.first);
  j["window_end"] = number(fit.window.second);
  j["samples"] = fit.samples;
  j["abscissa"] = number(abscissa);
  j["ratio"] = abscissa != 0.0 ? number(fit.alpha / (2.0 * std::abs(abscissa))) : nlohmann::ordered_json(nullptr);
  return j.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace bsb::io

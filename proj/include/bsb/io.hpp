#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bsb/analysis.hpp"
#include "bsb/dynamics.hpp"
#include "bsb/fem.hpp"
#include "bsb/model.hpp"
#include "bsb/spectral.hpp"

namespace bsb::io {

/// Reads `key = value` lines (l0, l1, l2, l3, rho1, rho2, beta; all required).
/// Blank lines and `#` comments are ignored. Unknown, duplicate or missing keys
/// and malformed numbers throw ConfigError; the result is validated.
StructureConfig parse_config(std::istream& in);
StructureConfig load_config(const std::filesystem::path& path);

/// 17 significant digits.
std::string format_double(double v);

void write_energy_csv(std::ostream& out, const EnergyTrace& trace);
void write_snapshots_csv(std::ostream& out, const Mesh& mesh, const DofMap& dofs,
                         const std::vector<Snapshot>& snapshots, int points);
void write_spectrum_csv(std::ostream& out, const SpectrumReport& report);
void write_resolvent_csv(std::ostream& out, const ResolventTable& table);

/// One `row col value` line per nonzero entry, 0-based indices.
void write_matrix_coo(std::ostream& out, const Eigen::MatrixXd& A);

std::string report_json(const VerificationReport& report);
std::string decay_json(const DecayFit& fit, double abscissa, DampingCase regime);

/// Writes `text` to path, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bsb::io

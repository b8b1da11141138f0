#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bsb::cli {

enum class Subcommand { Simulate, Spectrum, Resolvent, Decay, Modes, Verify };

enum class InitialShape { Plateau, SlowestMode };

struct RunSpec {
  Subcommand subcommand = Subcommand::Verify;
  std::string config_path;
  int n1 = 40, n2 = 40, n3 = 40;
  std::optional<double> dt;       // default: 1e-3 of the slowest string period
  std::optional<double> t_final;  // default: 10 for simulate, decay-driven otherwise
  double lambda_min = -50.0;
  double lambda_max = 50.0;
  int lambda_steps = 2001;
  std::string out_dir = ".";
  int snapshot_every = 0;
  int snapshot_points = 201;
  std::optional<double> c4;
  bool dump_matrices = false;
  int modes_count = 5;
  InitialShape initial = InitialShape::Plateau;
  bool help = false;  // --help was given; usage holds the text
  std::string usage;
};

/// Parses argv (without the program name). Throws Error{UsageError} whose
/// message includes the usage text.
RunSpec parse_args(const std::vector<std::string>& args);

/// Executes the run and returns the process exit status. Module errors are
/// reported on `err` with status 1; `verify` returns 1 when an invariant fails.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace bsb::cli

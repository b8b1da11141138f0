#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bsb/dynamics.hpp"
#include "bsb/spectral.hpp"

namespace bsb {

struct DecayFit {
  double alpha = 0.0;  // E(t) ~ exp(logC - alpha t)
  double logC = 0.0;
  double r_squared = 1.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t samples = 0;
};

/// Least-squares line through (t, log E) over samples with t in [window.first, window.second].
/// Throws WindowTooSmall (< 10 samples) or NonpositiveEnergy.
DecayFit fit_decay(const EnergyTrace& trace, std::pair<double, double> window);

/// Default window [0.2 T, 0.9 T] of the trace's final time T.
std::pair<double, double> default_fit_window(const EnergyTrace& trace);

struct InvariantResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
  std::string note;
};

struct VerificationReport {
  DampingCase regime = DampingCase::Other;
  double abscissa = 0.0;
  double min_distance_to_imaginary_axis = 0.0;
  std::optional<Complex> slowest;
  std::optional<DecayFit> fit;
  double alpha_fit = 0.0;
  double ratio = 0.0;           // alpha_fit / (2 |abscissa|)
  double ratio_discrete = 0.0;  // alpha_fit / trapezoidal_energy_rate(slowest, dt)
  double slowest_step_product = 0.0;  // |mu_slowest| dt
  bool time_resolved = true;    // slowest_step_product <= kTimeResolution
  bool defective_fit = false;
  double dt = 0.0;
  double t_final = 0.0;
  std::vector<InvariantResult> invariant_results;
  std::vector<std::string> notes;

  bool all_pass() const;
};

/// Largest |mu| dt at which the trapezoidal rule tracks a mode's decay rate
/// to within 1%.
inline constexpr double kTimeResolution = 0.2;

/// Acceptance band for the decay ratio by regime: [0.9, 1.1] with every
/// component damped, [0.8, 1.2] otherwise.
std::pair<double, double> ratio_band(DampingCase regime);

/// Compares the time-domain decay rate of the slowest mode with its
/// eigenvalue and evaluates the structural invariants of every module.
///
/// When dt resolves the slowest mode (|mu| dt <= kTimeResolution) the fitted
/// rate is held against 2 |abscissa|. Otherwise it is held against the
/// trapezoidal rule's own decay rate for that mode, and a note says so.
/// Conservative pencils get a "no decay to fit" note and are checked for alpha ~ 0.
VerificationReport cross_validate(const SystemPencil& pencil, double dt, double t_final);

/// Final time for the energy of mode mu to fall by e^-20 under trapezoidal
/// stepping, clamped to [1000, 20000] steps.
double suggested_t_final(Complex mu, double dt);

struct LyapunovRow {
  double time = 0.0;
  double E = 0.0;
  double F = 0.0;
  double L = 0.0;
  double margin = 0.0;  // min(L - c4 E / 2, 3 c4 E / 2 - L)
};

struct LyapunovAudit {
  double c4 = 0.0;
  std::vector<LyapunovRow> rows;
  bool sandwich_holds = true;
  bool nonincreasing = true;
  double worst_margin = 0.0;
  double largest_increase = 0.0;  // relative to c4 E at the earlier snapshot
};

/// Evaluates E, F and L = c4 E + F at every snapshot of `sim`, or at every
/// trace sample when no snapshots were stored. Throws NonpositiveC4.
LyapunovAudit lyapunov_audit(const SystemPencil& pencil, const SimOutput& sim, double c4);

}  // namespace bsb

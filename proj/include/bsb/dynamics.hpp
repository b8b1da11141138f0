#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "bsb/fem.hpp"

namespace bsb {

/// Sampled energy functionals along a trajectory.
struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> E;      // 1/2 (p'Sp + q'Mq)
  std::vector<double> Ddiss;  // -q'Dq, the instantaneous energy rate
  std::vector<double> F;      // p'Mq

  std::size_t size() const { return times.size(); }
};

struct Snapshot {
  double time = 0.0;
  StateVector state;
};

struct SimOutput {
  EnergyTrace trace;
  std::vector<Snapshot> snapshots;
  StateVector final_state;
};

double energy(const SystemPencil& pencil, const StateVector& y);
double dissipation(const SystemPencil& pencil, const StateVector& y);
double lyapunov_F(const SystemPencil& pencil, const StateVector& y);
double lyapunov_L(const SystemPencil& pencil, const StateVector& y, double c4);

/// Smallest c with |F| <= c E for every state: sqrt of the largest eigenvalue of (M, S).
double f_bound_constant(const SystemPencil& pencil);

/// 10 x sup |F|/E, taken from f_bound_constant().
double default_c4(const SystemPencil& pencil);

/// 1e-3 of the period of the slowest string mode (period 2 |I2|).
double default_dt(const StructureConfig& cfg);

/// Crank-Nicolson step matrices factored once for a fixed (pencil, dt).
///
/// Solves (B - dt/2 K) y_next = (B + dt/2 K) y. Along every step the energy
/// changes by exactly dt * dissipation((y + y_next) / 2).
class TrapezoidalStepper {
 public:
  TrapezoidalStepper(const SystemPencil& pencil, double dt);

  StateVector step(const StateVector& y) const;
  double dt() const { return dt_; }

 private:
  double dt_;
  Eigen::MatrixXd rhs_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// Energy decay rate that trapezoidal stepping imposes on an eigenmode mu:
/// -2 ln|(1 + dt mu / 2) / (1 - dt mu / 2)| / dt. Tends to -2 Re mu as dt |mu| -> 0.
double trapezoidal_energy_rate(std::complex<double> mu, double dt);

StateVector step_trapezoidal(const SystemPencil& pencil, const StateVector& y, double dt);

/// Implicit Euler: (B - dt K) y_next = B y. Numerically dissipative, used as a cross-check.
StateVector step_backward_euler(const SystemPencil& pencil, const StateVector& y, double dt);

/// Trapezoidal integration from t = 0 to t_final with the trace recorded at
/// every step. snapshot_every = k > 0 stores every k-th state (plus t = 0).
SimOutput simulate(const SystemPencil& pencil, const StateVector& y0, double dt, double t_final,
                   int snapshot_every = 0);

}  // namespace bsb

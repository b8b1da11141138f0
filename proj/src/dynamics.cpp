#include "bsb/dynamics.hpp"

#include <cmath>
#include <sstream>

#include "bsb/errors.hpp"

namespace bsb {

namespace {

void check_state(const SystemPencil& pencil, const StateVector& y) {
  if (y.p.size() != pencil.dofs() || y.q.size() != pencil.dofs()) {
    std::ostringstream os;
    os << "state has (" << y.p.size() << ", " << y.q.size() << ") entries, pencil has " << pencil.dofs() << " DOFs";
    throw Error(ErrorCode::DimensionMismatch, os.str());
  }
}

void check_dt(double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::NonpositiveParameter, "time step must be positive");
}

}  // namespace

double energy(const SystemPencil& pencil, const StateVector& y) {
  check_state(pencil, y);
  return 0.5 * (y.p.dot(pencil.S * y.p) + y.q.dot(pencil.M * y.q));
}

double dissipation(const SystemPencil& pencil, const StateVector& y) {
  check_state(pencil, y);
  return -y.q.dot(pencil.D * y.q);
}

double lyapunov_F(const SystemPencil& pencil, const StateVector& y) {
  check_state(pencil, y);
  return y.p.dot(pencil.M * y.q);
}

double lyapunov_L(const SystemPencil& pencil, const StateVector& y, double c4) {
  if (!(c4 > 0.0)) throw Error(ErrorCode::NonpositiveC4, "c4 must be positive");
  return c4 * energy(pencil, y) + lyapunov_F(pencil, y);
}

double f_bound_constant(const SystemPencil& pencil) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(pencil.M, pencil.S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::FactorizationFailure, "(M, S) eigenproblem failed");
  return std::sqrt(es.eigenvalues().maxCoeff());
}

double default_c4(const SystemPencil& pencil) { return 10.0 * f_bound_constant(pencil); }

double default_dt(const StructureConfig& cfg) { return 1e-3 * 2.0 * cfg.string_length(); }

TrapezoidalStepper::TrapezoidalStepper(const SystemPencil& pencil, double dt) : dt_(dt) {
  check_dt(dt);
  rhs_ = pencil.B + 0.5 * dt * pencil.K;
  lu_.compute(pencil.B - 0.5 * dt * pencil.K);
  if (!(lu_.rcond() > 0.0)) {
    throw Error(ErrorCode::SolveFailure, "trapezoidal step matrix is numerically singular");
  }
}

StateVector TrapezoidalStepper::step(const StateVector& y) const {
  if (2 * y.p.size() != rhs_.rows() || y.q.size() != y.p.size()) {
    throw Error(ErrorCode::DimensionMismatch, "state does not match stepper");
  }
  return StateVector::from_stacked(lu_.solve(rhs_ * y.stacked()));
}

double trapezoidal_energy_rate(std::complex<double> mu, double dt) {
  check_dt(dt);
  const std::complex<double> z = dt * mu;
  return -2.0 * std::log(std::abs((1.0 + 0.5 * z) / (1.0 - 0.5 * z))) / dt;
}

StateVector step_trapezoidal(const SystemPencil& pencil, const StateVector& y, double dt) {
  check_state(pencil, y);
  return TrapezoidalStepper(pencil, dt).step(y);
}

StateVector step_backward_euler(const SystemPencil& pencil, const StateVector& y, double dt) {
  check_state(pencil, y);
  check_dt(dt);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(pencil.B - dt * pencil.K);
  if (!(lu.rcond() > 0.0)) {
    throw Error(ErrorCode::SolveFailure, "backward Euler step matrix is numerically singular");
  }
  return StateVector::from_stacked(lu.solve(pencil.B * y.stacked()));
}

SimOutput simulate(const SystemPencil& pencil, const StateVector& y0, double dt, double t_final, int snapshot_every) {
  check_state(pencil, y0);
  check_dt(dt);
  if (!(t_final > 0.0)) throw Error(ErrorCode::NonpositiveParameter, "t_final must be positive");

  const TrapezoidalStepper stepper(pencil, dt);
  const auto steps = static_cast<long>(std::ceil(t_final / dt - 1e-9));

  SimOutput out;
  auto& tr = out.trace;
  tr.times.reserve(steps + 1);
  tr.E.reserve(steps + 1);
  tr.Ddiss.reserve(steps + 1);
  tr.F.reserve(steps + 1);
  auto record = [&](long k, const StateVector& y) {
    const double t = static_cast<double>(k) * dt;
    tr.times.push_back(t);
    tr.E.push_back(energy(pencil, y));
    tr.Ddiss.push_back(dissipation(pencil, y));
    tr.F.push_back(lyapunov_F(pencil, y));
    if (snapshot_every > 0 && k % snapshot_every == 0) out.snapshots.push_back({t, y});
  };

  StateVector y = y0;
  record(0, y);
  for (long k = 1; k <= steps; ++k) {
    y = stepper.step(y);
    record(k, y);
  }
  out.final_state = std::move(y);
  return out;
}

}  // namespace bsb

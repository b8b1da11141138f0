#include "bsb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "bsb/errors.hpp"

namespace bsb {

namespace {

InvariantResult check(std::string name, bool pass, double residual, std::string note = {}) {
  return {std::move(name), pass, residual, std::move(note)};
}

InvariantResult not_applicable(std::string name, std::string why) {
  return {std::move(name), true, 0.0, "not applicable: " + std::move(why)};
}

StateVector random_state(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StateVector y = StateVector::zero(n);
  for (Eigen::Index i = 0; i < n; ++i) y.p(i) = normal(rng);
  for (Eigen::Index i = 0; i < n; ++i) y.q(i) = normal(rng);
  return y;
}

double symmetry_defect(const Eigen::MatrixXd& A) { return (A - A.transpose()).cwiseAbs().maxCoeff(); }

// y^H A y accumulated in long double. The skew blocks of K cancel in the real
// part, and double accumulation leaves residuals near 1e-12 of |y^H K y|.
Complex extended_quadratic_form(const Eigen::MatrixXd& A, const Eigen::VectorXcd& y) {
  using LC = std::complex<long double>;
  LC sum = 0.0L;
  for (Eigen::Index j = 0; j < A.cols(); ++j) {
    LC col = 0.0L;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
      if (A(i, j) != 0.0) col += std::conj(LC(y(i))) * static_cast<long double>(A(i, j));
    }
    sum += col * LC(y(j));
  }
  return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
}

InvariantResult dissipativity_identity(const SystemPencil& P, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index n = P.dimension();
  const Eigen::Index half = P.dofs();
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXcd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = Complex(normal(rng), normal(rng));
    const Complex yKy = extended_quadratic_form(P.K, y);
    const double qDq = extended_quadratic_form(P.D, y.tail(half)).real();
    worst = std::max(worst, std::abs(yKy.real() + qDq) / (std::abs(yKy) + qDq + 1.0));
  }
  return check("fem.dissipativity_identity", worst <= 1e-12, worst);
}

InvariantResult positive_definite(std::string name, const Eigen::MatrixXd& A) {
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  const bool ok = llt.info() == Eigen::Success;
  double min_pivot = 0.0;
  if (ok) min_pivot = llt.matrixLLT().diagonal().minCoeff();
  return check(std::move(name), ok, min_pivot, "smallest Cholesky pivot");
}

InvariantResult positive_semidefinite(std::string name, const Eigen::MatrixXd& A) {
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0) return check(std::move(name), true, 0.0, "zero matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double tol = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
  return check(std::move(name), lo >= -tol, lo, "smallest eigenvalue");
}

InvariantResult step_energy_balance(const SystemPencil& P, double dt, std::mt19937_64& rng) {
  const TrapezoidalStepper stepper(P, dt);
  StateVector y = random_state(P.dofs(), rng);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const StateVector next = stepper.step(y);
    const StateVector mid{0.5 * (y.p + next.p), 0.5 * (y.q + next.q)};
    const double e0 = energy(P, y);
    const double lhs = energy(P, next) - e0;
    const double rhs = dt * dissipation(P, mid);
    worst = std::max(worst, std::abs(lhs - rhs) / e0);
    y = next;
  }
  return check("dynamics.step_energy_balance", worst <= 1e-9, worst, "200 steps from a random state");
}

InvariantResult energy_monotone(const EnergyTrace& tr) {
  double worst = 0.0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    if (tr.E[k - 1] > 0.0) worst = std::max(worst, (tr.E[k] - tr.E[k - 1]) / tr.E[k - 1]);
  }
  return check("dynamics.energy_nonincreasing", worst <= 1e-9, worst, "largest relative uptick per step");
}

InvariantResult conservation(const SystemPencil& P, double dt, std::mt19937_64& rng) {
  const TrapezoidalStepper stepper(P, dt);
  StateVector y = random_state(P.dofs(), rng);
  const double e0 = energy(P, y);
  for (int k = 0; k < 1000; ++k) y = stepper.step(y);
  const double drift = std::abs(energy(P, y) / e0 - 1.0);
  return check("dynamics.energy_conservation", drift <= 1e-9, drift, "1000 steps");
}

InvariantResult time_reversal(const SystemPencil& P, double dt, std::mt19937_64& rng) {
  const TrapezoidalStepper forward(P, dt);
  StateVector y0 = random_state(P.dofs(), rng);
  // With D = 0, flipping q conjugates K to -K, so a backward step is flip-step-flip.
  StateVector y = forward.step(y0);
  y.q = -y.q;
  y = forward.step(y);
  y.q = -y.q;
  const double scale = y0.stacked().norm();
  const double err = (y.stacked() - y0.stacked()).norm() / scale;
  return check("dynamics.time_reversal", err <= 1e-8, err);
}

InvariantResult f_bound(const SystemPencil& P, std::mt19937_64& rng) {
  const double c = f_bound_constant(P);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const StateVector y = random_state(P.dofs(), rng);
    worst = std::max(worst, std::abs(lyapunov_F(P, y)) / (c * energy(P, y)));
  }
  return check("dynamics.f_bound", worst <= 1.0 + 1e-12, worst, "max |F| / (c E) over 100 random states");
}

InvariantResult conjugate_symmetry(const SpectrumReport& s) {
  double worst = 0.0;
  double scale = 1.0;
  for (const auto& mu : s.eigenvalues) scale = std::max(scale, std::abs(mu));
  for (const auto& mu : s.eigenvalues) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& nu : s.eigenvalues) best = std::min(best, std::abs(std::conj(mu) - nu));
    worst = std::max(worst, best / scale);
  }
  return check("spectral.conjugate_symmetry", worst <= 1e-8, worst);
}

double spectrum_scale(const SpectrumReport& s) {
  double scale = 1.0;
  for (const auto& mu : s.eigenvalues) scale = std::max(scale, std::abs(mu));
  return scale;
}

InvariantResult whitening_consistency(const SystemPencil& P, const SpectrumReport& s) {
  if (P.dimension() > 100) return not_applicable("spectral.whitening_consistency", "pencil dimension above 100");
  const auto qz = generalized_eigenvalues(P);
  double worst = 0.0;
  for (const auto& mu : s.eigenvalues) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& nu : qz) best = std::min(best, std::abs(mu - nu));
    worst = std::max(worst, best / std::max(1.0, std::abs(mu)));
  }
  return check("spectral.whitening_consistency", worst <= 1e-8, worst, "vs QZ");
}

InvariantResult resolvent_lower_bound(const SystemPencil& P, const SpectrumReport& s) {
  const ResolventEvaluator eval(P);
  double worst = 0.0;
  for (int k = 0; k <= 20; ++k) {
    const double lambda = -50.0 + 5.0 * k + 0.0123;
    const double norm = eval.norm(lambda);
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& mu : s.eigenvalues) dist = std::min(dist, std::abs(Complex(0.0, lambda) - mu));
    // norm * dist >= 1 must hold; record how far below 1 it falls
    worst = std::max(worst, 1.0 - norm * dist);
  }
  return check("spectral.resolvent_lower_bound", worst <= 1e-8, std::max(worst, 0.0), "21 points on [-50, 50]");
}

InvariantResult neweq_positive() {
  double lo = std::numeric_limits<double>::infinity();
  const int points = 10000;
  const double a0 = std::log(1e-6), a1 = std::log(400.0);
  for (int k = 1; k <= points; ++k) lo = std::min(lo, neweq_determinant(std::exp(a0 + (a1 - a0) * k / points)));
  return check("spectral.determinant_positive", lo > 1.0, lo, "min of cosh(sqrt a) + cos(sqrt a) on (1e-6, 400]");
}

InvariantResult synthetic_fit() {
  EnergyTrace tr;
  for (int k = 0; k < 100; ++k) {
    const double t = 0.05 * k;
    tr.times.push_back(t);
    tr.E.push_back(std::exp(-3.0 * t));
    tr.Ddiss.push_back(0.0);
    tr.F.push_back(0.0);
  }
  const DecayFit fit = fit_decay(tr, {tr.times.front(), tr.times.back()});
  const double err = std::abs(fit.alpha - 3.0);
  return check("analysis.fit_exact_on_exponential", err <= 1e-10, err);
}

}  // namespace

DecayFit fit_decay(const EnergyTrace& trace, std::pair<double, double> window) {
  double st = 0.0, sy = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.times[k];
    if (t < window.first || t > window.second) continue;
    if (!(trace.E[k] > 0.0)) {
      std::ostringstream os;
      os << "energy " << trace.E[k] << " at t=" << t << " cannot be log-fitted";
      throw Error(ErrorCode::NonpositiveEnergy, os.str());
    }
    st += t;
    sy += std::log(trace.E[k]);
    ++n;
  }
  if (n < 10) {
    std::ostringstream os;
    os << "fit window holds " << n << " samples, need at least 10";
    throw Error(ErrorCode::WindowTooSmall, os.str());
  }
  const double tm = st / n, ym = sy / n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = trace.times[k];
    if (t < window.first || t > window.second) continue;
    const double dt = t - tm, dy = std::log(trace.E[k]) - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  DecayFit fit;
  const double slope = stt > 0.0 ? sty / stt : 0.0;
  fit.alpha = -slope;
  fit.logC = ym - slope * tm;
  fit.r_squared = syy > 0.0 ? std::clamp(sty * sty / (stt * syy), 0.0, 1.0) : 1.0;
  fit.window = window;
  fit.samples = n;
  return fit;
}

std::pair<double, double> default_fit_window(const EnergyTrace& trace) {
  const double T = trace.times.empty() ? 0.0 : trace.times.back();
  return {0.2 * T, 0.9 * T};
}

bool VerificationReport::all_pass() const {
  return std::all_of(invariant_results.begin(), invariant_results.end(), [](const auto& r) { return r.pass; });
}

std::pair<double, double> ratio_band(DampingCase regime) {
  if (regime == DampingCase::DDD) return {0.9, 1.1};
  return {0.8, 1.2};
}

double suggested_t_final(Complex mu, double dt) {
  const double rate = trapezoidal_energy_rate(mu, dt);
  const double T = rate > 0.0 ? 20.0 / rate : 1000.0 * dt;
  return std::clamp(T, 1000.0 * dt, 20000.0 * dt);
}

VerificationReport cross_validate(const SystemPencil& pencil, double dt, double t_final) {
  VerificationReport rep;
  rep.regime = pencil.regime;
  rep.dt = dt;
  rep.t_final = t_final;
  std::mt19937_64 rng(424242);

  const SpectrumReport spec = eigenvalues(pencil);
  rep.abscissa = spectral_abscissa(spec);
  rep.min_distance_to_imaginary_axis = spec.min_distance_to_imaginary_axis;
  for (const auto& w : spec.warnings) rep.notes.push_back(w);
  const double scale = spectrum_scale(spec);

  const SlowestMode mode = slowest_mode(pencil);
  rep.slowest = mode.mu;
  const SimOutput sim = simulate(pencil, mode.real_part, dt, t_final);
  const DecayFit fit = fit_decay(sim.trace, default_fit_window(sim.trace));
  rep.fit = fit;
  rep.alpha_fit = fit.alpha;

  auto& out = rep.invariant_results;
  out.push_back(check("model.regime_consistent_with_damping",
                      (pencil.regime == DampingCase::Conservative) == (pencil.D.cwiseAbs().maxCoeff() == 0.0), 0.0,
                      "D vanishes exactly in the conservative regime"));

  out.push_back(check("fem.symmetry",
                      symmetry_defect(pencil.S) == 0.0 && symmetry_defect(pencil.M) == 0.0 &&
                          symmetry_defect(pencil.D) == 0.0,
                      std::max({symmetry_defect(pencil.S), symmetry_defect(pencil.M), symmetry_defect(pencil.D)})));
  out.push_back(positive_definite("fem.S_positive_definite", pencil.S));
  out.push_back(positive_definite("fem.M_positive_definite", pencil.M));
  out.push_back(positive_semidefinite("fem.D_positive_semidefinite", pencil.D));
  out.push_back(dissipativity_identity(pencil, rng));

  out.push_back(step_energy_balance(pencil, dt, rng));
  if (is_dissipative(pencil.regime)) {
    out.push_back(energy_monotone(sim.trace));
    out.push_back(not_applicable("dynamics.energy_conservation", "damped regime"));
    out.push_back(not_applicable("dynamics.time_reversal", "damped regime"));
  } else {
    out.push_back(energy_monotone(sim.trace));
    out.push_back(conservation(pencil, dt, rng));
    out.push_back(time_reversal(pencil, dt, rng));
  }
  out.push_back(f_bound(pencil, rng));

  out.push_back(conjugate_symmetry(spec));
  out.push_back(check("spectral.abscissa_nonpositive", rep.abscissa <= 1e-8 * scale, rep.abscissa));
  out.push_back(whitening_consistency(pencil, spec));
  out.push_back(resolvent_lower_bound(pencil, spec));
  if (pencil.regime == DampingCase::UDU) {
    out.push_back(check("spectral.strict_decay_all_modes", rep.abscissa < 0.0, rep.min_distance_to_imaginary_axis,
                        "min |Re mu| over the spectrum"));
  } else {
    out.push_back(not_applicable("spectral.strict_decay_all_modes", "checked for UDU only"));
  }
  out.push_back(neweq_positive());

  out.push_back(synthetic_fit());
  if (!is_dissipative(pencil.regime)) {
    rep.notes.push_back("no decay to fit: conservative regime");
    out.push_back(check("analysis.decay_rate_ratio", std::abs(fit.alpha) <= 1e-6, std::abs(fit.alpha),
                        "|alpha| for the conservative regime"));
  } else {
    rep.ratio = fit.alpha / (2.0 * std::abs(rep.abscissa));
    rep.ratio_discrete = fit.alpha / trapezoidal_energy_rate(mode.mu, dt);
    rep.slowest_step_product = std::abs(mode.mu) * dt;
    rep.time_resolved = rep.slowest_step_product <= kTimeResolution;
    const auto [lo, hi] = ratio_band(pencil.regime);
    rep.defective_fit = fit.r_squared < 0.999;
    double ratio = rep.ratio;
    double reference = 2.0 * std::abs(rep.abscissa);
    std::string note;
    if (!rep.time_resolved) {
      ratio = rep.ratio_discrete;
      reference = trapezoidal_energy_rate(mode.mu, dt);
      std::ostringstream os;
      os << "slowest mode not resolved in time (|mu| dt = " << rep.slowest_step_product
         << "); fitted rate compared with the trapezoidal decay rate of that mode";
      note = os.str();
      rep.notes.push_back(note);
    }
    if (rep.defective_fit) {
      const double floor = 0.9 * reference * (1.0 - (hi - 1.0));
      rep.notes.push_back("log-linear fit r^2 < 0.999: one-sided decay check");
      out.push_back(check("analysis.decay_rate_ratio", fit.alpha >= floor, ratio, "one-sided; " + note));
    } else {
      out.push_back(check("analysis.decay_rate_ratio", ratio >= lo && ratio <= hi, ratio, note));
    }
  }

  const LyapunovAudit audit = lyapunov_audit(pencil, sim, default_c4(pencil));
  if (pencil.regime == DampingCase::DDD) {
    out.push_back(check("analysis.lyapunov_sandwich", audit.sandwich_holds && audit.nonincreasing,
                        audit.worst_margin, "default c4 along the slowest-mode run; L nonincreasing"));
  } else {
    out.push_back(check("analysis.lyapunov_sandwich", audit.sandwich_holds, audit.worst_margin,
                        "default c4; monotonicity of L is only claimed with every component damped"));
  }
  return rep;
}

LyapunovAudit lyapunov_audit(const SystemPencil& pencil, const SimOutput& sim, double c4) {
  if (!(c4 > 0.0)) throw Error(ErrorCode::NonpositiveC4, "c4 must be positive");
  LyapunovAudit a;
  a.c4 = c4;
  auto add = [&](double t, double E, double F) {
    LyapunovRow r{t, E, F, c4 * E + F, 0.0};
    r.margin = std::min(r.L - 0.5 * c4 * E, 1.5 * c4 * E - r.L);
    a.rows.push_back(r);
  };
  if (!sim.snapshots.empty()) {
    for (const auto& s : sim.snapshots) add(s.time, energy(pencil, s.state), lyapunov_F(pencil, s.state));
  } else {
    for (std::size_t k = 0; k < sim.trace.size(); ++k) add(sim.trace.times[k], sim.trace.E[k], sim.trace.F[k]);
  }
  a.worst_margin = a.rows.empty() ? 0.0 : a.rows.front().margin;
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    const auto& r = a.rows[k];
    a.worst_margin = std::min(a.worst_margin, r.margin);
    if (r.margin < 0.0) a.sandwich_holds = false;
    if (k > 0) {
      const auto& prev = a.rows[k - 1];
      const double ref = c4 * prev.E;
      const double rise = ref > 0.0 ? (r.L - prev.L) / ref : r.L - prev.L;
      a.largest_increase = std::max(a.largest_increase, rise);
      if (rise > 1e-9) a.nonincreasing = false;
    }
  }
  return a;
}

}  // namespace bsb

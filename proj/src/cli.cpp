#include "bsb/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "bsb/analysis.hpp"
#include "bsb/dynamics.hpp"
#include "bsb/errors.hpp"
#include "bsb/fem.hpp"
#include "bsb/io.hpp"
#include "bsb/spectral.hpp"

namespace bsb::cli {

namespace {

const std::map<std::string, Subcommand> kSubcommands = {
    {"simulate", Subcommand::Simulate}, {"spectrum", Subcommand::Spectrum}, {"resolvent", Subcommand::Resolvent},
    {"decay", Subcommand::Decay},       {"modes", Subcommand::Modes},       {"verify", Subcommand::Verify},
};

struct Problem {
  StructureConfig cfg;
  Mesh mesh;
  DofMap dofs;
  SystemPencil pencil;
};

Problem build_problem(const RunSpec& spec) {
  Problem p;
  p.cfg = io::load_config(spec.config_path);
  p.mesh = build_mesh(p.cfg, spec.n1, spec.n2, spec.n3);
  p.dofs = build_dof_map(p.mesh);
  p.pencil = assemble_pencil(p.cfg, p.mesh, p.dofs);
  return p;
}

// Unit deflection plateau: rises quadratically along each beam from the
// clamped end and is flat across the string.
InitialData plateau(const StructureConfig& c) {
  InitialData d;
  const double a = c.beam1_length(), b = c.beam2_length();
  d.u0.value = [c, a](double x) { return (x - c.l0) * (x - c.l0) / (a * a); };
  d.u0.slope = [c, a](double x) { return 2.0 * (x - c.l0) / (a * a); };
  d.v0 = [](double) { return 1.0; };
  d.w0.value = [c, b](double x) { return (c.l3 - x) * (c.l3 - x) / (b * b); };
  d.w0.slope = [c, b](double x) { return -2.0 * (c.l3 - x) / (b * b); };
  return d;
}

std::string text_of(const std::function<void(std::ostream&)>& writer) {
  std::ostringstream os;
  writer(os);
  return os.str();
}

void dump_matrices(const Problem& p, const std::filesystem::path& dir) {
  io::write_file(dir / "S.txt", text_of([&](std::ostream& o) { io::write_matrix_coo(o, p.pencil.S); }));
  io::write_file(dir / "M.txt", text_of([&](std::ostream& o) { io::write_matrix_coo(o, p.pencil.M); }));
  io::write_file(dir / "D.txt", text_of([&](std::ostream& o) { io::write_matrix_coo(o, p.pencil.D); }));
}

double resolve_dt(const RunSpec& spec, const Problem& p) { return spec.dt ? *spec.dt : default_dt(p.cfg); }

int run_simulate(const RunSpec& spec, const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  const double dt = resolve_dt(spec, p);
  const double t_final = spec.t_final ? *spec.t_final : 10.0;
  const StateVector y0 = spec.initial == InitialShape::SlowestMode ? slowest_mode(p.pencil).real_part
                                                                   : interpolate(plateau(p.cfg), p.mesh, p.dofs);
  const SimOutput sim = simulate(p.pencil, y0, dt, t_final, spec.snapshot_every);
  io::write_file(dir / "energy.csv", text_of([&](std::ostream& o) { io::write_energy_csv(o, sim.trace); }));
  if (spec.snapshot_every > 0) {
    io::write_file(dir / "snapshots.csv", text_of([&](std::ostream& o) {
                     io::write_snapshots_csv(o, p.mesh, p.dofs, sim.snapshots, spec.snapshot_points);
                   }));
  }
  out << "steps " << sim.trace.size() - 1 << ", E(0) = " << io::format_double(sim.trace.E.front())
      << ", E(T) = " << io::format_double(sim.trace.E.back()) << '\n';
  if (spec.c4) {
    const LyapunovAudit audit = lyapunov_audit(p.pencil, sim, *spec.c4);
    out << "lyapunov c4 = " << io::format_double(audit.c4) << ": sandwich "
        << (audit.sandwich_holds ? "holds" : "violated") << ", L " << (audit.nonincreasing ? "nonincreasing" : "increases")
        << '\n';
  }
  return 0;
}

int run_spectrum(const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  const SpectrumReport r = eigenvalues(p.pencil);
  io::write_file(dir / "spectrum.csv", text_of([&](std::ostream& o) { io::write_spectrum_csv(o, r); }));
  out << "regime " << to_string(r.regime) << ", " << r.eigenvalues.size() << " eigenvalues, abscissa "
      << io::format_double(r.abscissa) << ", min |Re| " << io::format_double(r.min_distance_to_imaginary_axis) << '\n';
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  return 0;
}

int run_resolvent(const RunSpec& spec, const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  const ResolventTable t = resolvent_sweep(p.pencil, spec.lambda_min, spec.lambda_max, spec.lambda_steps);
  io::write_file(dir / "resolvent.csv", text_of([&](std::ostream& o) { io::write_resolvent_csv(o, t); }));
  out << "sup resolvent norm " << io::format_double(t.sup_norm) << '\n';
  return 0;
}

int run_decay(const RunSpec& spec, const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  const double dt = resolve_dt(spec, p);
  const SpectrumReport r = eigenvalues(p.pencil);
  const SlowestMode mode = slowest_mode(p.pencil);
  const double t_final = spec.t_final ? *spec.t_final : suggested_t_final(mode.mu, dt);
  const SimOutput sim = simulate(p.pencil, mode.real_part, dt, t_final);
  const DecayFit fit = fit_decay(sim.trace, default_fit_window(sim.trace));
  io::write_file(dir / "decay.json", io::decay_json(fit, r.abscissa, p.pencil.regime));
  out << "alpha " << io::format_double(fit.alpha) << ", 2|abscissa| " << io::format_double(2.0 * std::abs(r.abscissa))
      << ", r^2 " << io::format_double(fit.r_squared) << '\n';
  return 0;
}

int run_modes(const RunSpec& spec, const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  std::ostringstream os;
  os << "kind,index,re,im\n";
  for (int k = 1; k <= spec.modes_count; ++k) {
    const auto [a, b] = string_modes_closed_form(p.cfg.beta, p.cfg.string_length(), k);
    for (const Complex& mu : {a, b})
      os << "string," << k << ',' << io::format_double(mu.real()) << ',' << io::format_double(mu.imag()) << '\n';
  }
  const auto beam1 = beam_clamped_free_frequencies(p.cfg.beam1_length(), spec.modes_count);
  const auto beam2 = beam_clamped_free_frequencies(p.cfg.beam2_length(), spec.modes_count);
  for (int k = 0; k < spec.modes_count; ++k)
    os << "beam1_clamped_free," << k + 1 << ",0," << io::format_double(beam1[k]) << '\n';
  for (int k = 0; k < spec.modes_count; ++k)
    os << "beam2_clamped_free," << k + 1 << ",0," << io::format_double(beam2[k]) << '\n';
  io::write_file(dir / "modes.csv", os.str());
  out << "wrote " << 4 * spec.modes_count << " closed-form modes\n";
  return 0;
}

int run_verify(const RunSpec& spec, const Problem& p, const std::filesystem::path& dir, std::ostream& out) {
  const double dt = resolve_dt(spec, p);
  const double t_final = spec.t_final ? *spec.t_final : suggested_t_final(slowest_mode(p.pencil).mu, dt);
  const VerificationReport rep = cross_validate(p.pencil, dt, t_final);
  io::write_file(dir / "report.json", io::report_json(rep));
  for (const auto& inv : rep.invariant_results) {
    out << (inv.pass ? "PASS " : "FAIL ") << inv.name << " (" << io::format_double(inv.residual) << ")\n";
  }
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

RunSpec parse_args(const std::vector<std::string>& args) {
  RunSpec spec;
  CLI::App app{"Beam-string-beam stability laboratory", "bsblab"};
  app.require_subcommand(1, 1);

  std::map<std::string, CLI::App*> subs;
  double dt = 0.0, t_final = 0.0, c4 = 0.0;
  std::string initial = "plateau";
  const std::map<std::string, std::string> help = {
      {"simulate", "integrate in time, write energy.csv (and snapshots.csv)"},
      {"spectrum", "eigenvalues of the generator, write spectrum.csv"},
      {"resolvent", "energy-norm resolvent sweep along the imaginary axis, write resolvent.csv"},
      {"decay", "fit the energy decay rate of the slowest mode, write decay.json"},
      {"modes", "closed-form string and clamped-free beam modes, write modes.csv"},
      {"verify", "run every invariant check, write report.json; exit 0 iff all pass"},
  };
  for (const auto& [name, text] : help) {
    CLI::App* s = app.add_subcommand(name, text);
    s->add_option("--config", spec.config_path, "structure configuration file")->required();
    s->add_option("--n1", spec.n1, "elements on beam 1")->check(CLI::PositiveNumber);
    s->add_option("--n2", spec.n2, "elements on the string")->check(CLI::PositiveNumber);
    s->add_option("--n3", spec.n3, "elements on beam 2")->check(CLI::PositiveNumber);
    s->add_option("--out-dir", spec.out_dir, "output directory");
    s->add_flag("--dump-matrices", spec.dump_matrices, "write S, M, D in coordinate format");
    if (name == "simulate" || name == "decay" || name == "verify") {
      s->add_option("--dt", dt, "time step")->check(CLI::PositiveNumber);
      s->add_option("--t-final", t_final, "final time")->check(CLI::PositiveNumber);
    }
    if (name == "simulate") {
      s->add_option("--snapshot-every", spec.snapshot_every, "store every k-th state")->check(CLI::NonNegativeNumber);
      s->add_option("--snapshot-points", spec.snapshot_points, "x-grid size of snapshots.csv")->check(CLI::Range(2, 1000000));
      s->add_option("--c4", c4, "Lyapunov weight for the L = c4 E + F audit")->check(CLI::PositiveNumber);
      s->add_option("--initial", initial, "initial data")->check(CLI::IsMember({"plateau", "slowest-mode"}));
    }
    if (name == "resolvent") {
      s->add_option("--lambda-min", spec.lambda_min, "left end of the lambda grid");
      s->add_option("--lambda-max", spec.lambda_max, "right end of the lambda grid");
      s->add_option("--lambda-steps", spec.lambda_steps, "grid points (>= 2)")->check(CLI::Range(2, 100000000));
    }
    if (name == "modes") s->add_option("--count", spec.modes_count, "modes per family")->check(CLI::PositiveNumber);
    subs[name] = s;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    spec.help = true;
    spec.usage = app.help();
    return spec;
  } catch (const CLI::ParseError& e) {
    std::string usage = app.help();
    for (const auto& [name, s] : subs)
      if (s->parsed()) usage = s->help();
    throw Error(ErrorCode::UsageError, std::string(e.what()) + "\n" + usage);
  }

  for (const auto& [name, s] : subs) {
    if (!s->parsed()) continue;
    spec.subcommand = kSubcommands.at(name);
    auto given = [s](const char* flag) {
      const CLI::Option* o = s->get_option_no_throw(flag);
      return o != nullptr && o->count() > 0;
    };
    if (given("--dt")) spec.dt = dt;
    if (given("--t-final")) spec.t_final = t_final;
    if (given("--c4")) spec.c4 = c4;
    if (name == "resolvent" && !(spec.lambda_min < spec.lambda_max)) {
      throw Error(ErrorCode::UsageError, "--lambda-min must be below --lambda-max\n" + s->help());
    }
  }
  spec.initial = initial == "slowest-mode" ? InitialShape::SlowestMode : InitialShape::Plateau;
  spec.usage = app.help();
  return spec;
}

int run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  if (spec.help) {
    out << spec.usage;
    return 0;
  }
  try {
    const std::filesystem::path dir(spec.out_dir);
    std::filesystem::create_directories(dir);
    const Problem p = build_problem(spec);
    if (spec.dump_matrices) dump_matrices(p, dir);
    switch (spec.subcommand) {
      case Subcommand::Simulate: return run_simulate(spec, p, dir, out);
      case Subcommand::Spectrum: return run_spectrum(p, dir, out);
      case Subcommand::Resolvent: return run_resolvent(spec, p, dir, out);
      case Subcommand::Decay: return run_decay(spec, p, dir, out);
      case Subcommand::Modes: return run_modes(spec, p, dir, out);
      case Subcommand::Verify: return run_verify(spec, p, dir, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace bsb::cli

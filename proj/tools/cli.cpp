#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mcm/analysis.hpp"
#include "mcm/circuit_io.hpp"
#include "mcm/model_io.hpp"

namespace mcm::cli {

namespace {

/// Usage or configuration problem detected after argument parsing.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Mode { kDiagonal, kNondiagonal, kAuto };

struct StepOptions {
  double dt = 0.01;
  double gamma = 1.0;
  double gs_ratio = 0.05;
  std::size_t cap = kDefaultDimensionCap;
  bool diagonal = false;
  bool nondiagonal = false;
  bool automatic = false;

  Mode mode() const {
    if (int(diagonal) + int(nondiagonal) + int(automatic) > 1) {
      throw UsageError("choose one of --diagonal, --nondiagonal, --auto");
    }
    if (nondiagonal) return Mode::kNondiagonal;
    if (automatic) return Mode::kAuto;
    return Mode::kDiagonal;
  }
};

void add_step_options(CLI::App* cmd, StepOptions& o, bool with_dt = true) {
  if (with_dt) cmd->add_option("--dt", o.dt, "Timestep")->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", o.gamma, "Energy scale gamma = g_I^2 dt")->check(CLI::PositiveNumber);
  cmd->add_option("--gs-ratio", o.gs_ratio, "g_S / g_I")->check(CLI::NonNegativeNumber);
  cmd->add_option("--cap", o.cap, "Dimension cap for joint spaces and superoperators");
  cmd->add_flag("--diagonal", o.diagonal, "Diagonalize first (default)");
  cmd->add_flag("--nondiagonal", o.nondiagonal, "Engineer the Kossakowski matrix directly");
  cmd->add_flag("--auto", o.automatic, "Non-diagonal, falling back to diagonal");
}

struct Loaded {
  ModelDocument doc;
  GKLSModel model;
};

Loaded load_valid(const std::string& path) {
  Loaded l{load_model(path), {}};
  l.model = to_model(l.doc);
  auto report = validate(l.model);
  if (!report.accepted()) {
    const auto* f = report.first_failure();
    std::string what = "model fails invariant '" + f->name + "': " + f->detail;
    throw ValidationError(what, std::move(report));
  }
  return l;
}

struct Compiled {
  CollisionCircuit circuit;
  GKLSModel kossakowski_target;  // gamma the induced coefficients should match
  std::string path;
};

Compiled compile_model(const Loaded& l, Mode mode, const StepParams& params, std::ostream& err) {
  if (auto bath = thermal_bath(l.doc)) {
    std::optional<Matrix> h;
    if (max_abs(l.model.hamiltonian) > 0.0) h = l.model.hamiltonian;
    return {compile_thermal(*bath, l.model.layout, params, h), l.model, "thermal"};
  }
  auto diagonal = [&] {
    const DiagonalModel dm = diagonalize(l.model);
    return Compiled{compile_diagonal(dm, params), dm.as_gkls(), "diagonal"};
  };
  switch (mode) {
    case Mode::kDiagonal: return diagonal();
    case Mode::kNondiagonal:
      return {compile_nondiagonal(l.model, params), l.model, "non-diagonal"};
    case Mode::kAuto:
      try {
        return {compile_nondiagonal(l.model, params), l.model, "non-diagonal"};
      } catch (const InfeasibleEngineering& e) {
        err << "note: " << e.what() << "; using the diagonal form\n";
        return diagonal();
      }
  }
  return diagonal();
}

StepParams step_params(const StepOptions& o, double dt) {
  return StepParams::from_gamma(o.gamma, dt, o.gs_ratio);
}

void print_warnings(const StepParams& p, std::ostream& err) {
  for (const auto& w : p.warnings()) err << "warning: " << w << '\n';
}

double kossakowski_residual(const CollisionCircuit& c, const GKLSModel& target) {
  const GKLSModel induced = induced_model(c);
  if (induced.kossakowski.rows() != target.kossakowski.rows() ||
      induced.kossakowski.cols() != target.kossakowski.cols()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return max_abs(induced.kossakowski - target.kossakowski);
}

void print_summary(const Compiled& c, std::ostream& out) {
  const auto& circ = c.circuit;
  out << "compilation: " << c.path << '\n';
  out << "ancillas: " << circ.ancillas.size() << '\n';
  out << "gates per step: " << circ.total_gate_count() << " (" << circ.interaction_gate_count()
      << " interaction, " << circ.system_gates.size() << " system)\n";
  out << "dt: " << circ.params.dt << "  g_I: " << circ.params.g_I
      << "  g_S: " << circ.params.g_S << "  gamma: " << circ.params.gamma << '\n';
  out << "ancilla  c  target  lambda\n";
  for (const auto& a : circ.ancillas) {
    for (const auto& cp : a.couplings) {
      out << "  " << a.id << "  " << a.c << "  " << cp.target << "  " << cp.lambda.real();
      if (cp.lambda.imag() != 0.0) out << (cp.lambda.imag() < 0 ? "-" : "+")
                                        << std::abs(cp.lambda.imag()) << "i";
      out << "  " << a.label << '\n';
    }
  }
  const double res = kossakowski_residual(circ, c.kossakowski_target);
  out << "induced Kossakowski residual: ";
  if (std::isnan(res)) {
    out << "n/a\n";
  } else {
    out << res << '\n';
  }
}

template <typename F>
void write_file_or(const std::string& path, std::ostream& fallback, F&& writer) {
  if (path.empty() || path == "-") {
    writer(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  writer(f);
}

// ---- initial states -------------------------------------------------------

Matrix initial_state(const std::string& spec, const TensorLayout& layout) {
  const auto D = static_cast<Eigen::Index>(layout.total_dim());
  const std::size_t M = layout.size();
  if (spec == "mixed") return Matrix::Identity(D, D) / static_cast<double>(D);
  if (spec.rfind("basis:", 0) == 0) {
    const auto k = static_cast<Eigen::Index>(std::stoul(spec.substr(6)));
    if (k >= D) throw UsageError("basis index out of range");
    Matrix rho = Matrix::Zero(D, D);
    rho(k, k) = 1.0;
    return rho;
  }
  const bool qubits = std::all_of(layout.dims().begin(), layout.dims().end(),
                                  [](std::size_t d) { return d == 2; });
  if (!qubits) throw UsageError("initial state '" + spec + "' needs qubits; use mixed or basis:K");
  Vector psi;
  if (spec == "w") {
    // Symmetric single-excitation state.
    psi = Vector::Zero(D);
    for (std::size_t m = 0; m < M; ++m) {
      Eigen::Index idx = 0;
      for (std::size_t s = 0; s < M; ++s) idx = 2 * idx + (s == m ? 0 : 1);
      psi(idx) = 1.0;
    }
    psi.normalize();
  } else {
    std::string letters = spec;
    if (spec == "excited") letters.assign(M, 'e');
    if (spec == "ground") letters.assign(M, 'g');
    if (letters.size() != M) {
      throw UsageError("initial state '" + spec + "': expected excited, ground, mixed, w, "
                       "basis:K or one of e g + - per site");
    }
    psi = Vector::Ones(1);
    const double r = 1.0 / std::sqrt(2.0);
    for (char ch : letters) {
      Vector q(2);
      switch (ch) {
        case 'e': q << 1.0, 0.0; break;
        case 'g': q << 0.0, 1.0; break;
        case '+': q << r, r; break;
        case '-': q << r, -r; break;
        default: throw UsageError(std::string("initial state letter '") + ch + "'");
      }
      psi = kron(psi, q);
    }
  }
  return psi * psi.adjoint();
}

std::size_t steps_for(std::optional<std::size_t> n, std::optional<double> t, double dt) {
  if (n) return *n;
  if (!t) throw UsageError("give --n or --t");
  const double steps = std::round(*t / dt);
  if (steps < 1.0 || std::abs(steps * dt - *t) > 1e-9 * std::max(1.0, *t)) {
    throw UsageError("--t must be a positive multiple of --dt");
  }
  return static_cast<std::size_t>(steps);
}

std::size_t klocal_terms(const ModelDocument& doc) {
  return doc.klocal && !doc.klocal->terms.empty() ? doc.klocal->terms.size() : 1;
}

void print_bounds(const BoundInputs& in, std::ostream& out) {
  const auto p = prescriptions(in);
  out << "Lambda: " << in.Lambda << "\nXi: " << in.Xi << "\nK: " << in.K << "\nJ: " << in.J
      << "\nR: " << in.R << "\na_max: " << in.a_max << "\ng_I: " << in.g_I
      << "\ng_S: " << in.g_S << "\ngamma: " << in.gamma << "\ndt: " << in.dt << '\n';
  out << "prescription truncation (2 R Lambda (1 + J R Lambda) gamma dt < 1): "
      << (p.truncation ? "holds" : "violated") << '\n';
  out << "prescription interaction (4 Xi dt g_I Lambda < 1): "
      << (p.interaction ? "holds" : "violated") << '\n';
  out << "prescription system (2 dt K g_S Lambda < 1): " << (p.system ? "holds" : "violated")
      << '\n';
  out << "truncation bound: " << truncation_bound(in) << '\n';
  out << "truncation bound (a_max form): " << truncation_bound_amax(in) << '\n';
  out << "pol1: " << pol1(in) << "\npol2: " << pol2(in) << '\n';
  out << "collision bound: " << collision_bound(in) << '\n';
  out << "single-step bound: " << truncation_bound(in) + collision_bound(in) << '\n';
}

// ---- commands -------------------------------------------------------------

int cmd_validate(const std::string& path, const std::string& report_path, std::ostream& out) {
  const ModelDocument doc = load_model(path);
  const GKLSModel model = to_model(doc);
  const ValidationReport report = validate(model);
  auto write = [&](std::ostream& os) {
    for (const auto& c : report.checks) {
      os << (c.passed ? "ok    " : "FAIL  ") << c.name;
      if (!c.detail.empty()) os << "  (" << c.detail << ")";
      os << '\n';
    }
    os << "kossakowski min eigenvalue: " << report.kossakowski_min_eigenvalue << '\n';
    os << (report.accepted() ? "model accepted" : "model rejected") << '\n';
  };
  write(out);
  if (!report_path.empty()) write_file_or(report_path, out, write);
  return report.accepted() ? kOk : kValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collision-model compiler and simulator for GKLS master equations", "mcm"};
  app.require_subcommand(1);
  out << std::setprecision(10);

  // validate
  std::string model_path;
  std::string report_path;
  auto* validate_cmd = app.add_subcommand("validate", "Check a model document");
  validate_cmd->add_option("model", model_path, "Model JSON")->required();
  validate_cmd->add_option("--report", report_path, "Also write the report to this file");

  // compile
  StepOptions compile_opts;
  std::string compile_out;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a model into a collision circuit");
  compile_cmd->add_option("model", model_path, "Model JSON")->required();
  add_step_options(compile_cmd, compile_opts);
  compile_cmd->add_option("-o,--output", compile_out, "Circuit file (default: stdout)");

  // simulate
  StepOptions sim_opts;
  std::string sim_circuit;
  std::optional<std::size_t> sim_n;
  std::optional<double> sim_t;
  std::string sim_initial = "excited";
  std::size_t sim_samples = 64;
  std::optional<std::uint64_t> sim_seed;
  std::string sim_traj;
  std::string sim_errors;
  auto* sim_cmd = app.add_subcommand("simulate", "Run the collision model and compare with exp(L t)");
  sim_cmd->add_option("model", model_path, "Model JSON")->required();
  add_step_options(sim_cmd, sim_opts);
  sim_cmd->add_option("--circuit", sim_circuit, "Precompiled circuit (else compile the model)");
  sim_cmd->add_option("--n", sim_n, "Number of steps")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--t", sim_t, "Final time (multiple of dt)")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--initial", sim_initial,
                      "excited | ground | mixed | w | basis:K | per-site letters e g + -");
  sim_cmd->add_option("--samples", sim_samples, "Random states for sampled error bounds");
  sim_cmd->add_option("--seed", sim_seed, "Seed for sampled error bounds (enables them)");
  sim_cmd->add_option("--trajectory", sim_traj, "Trajectory CSV");
  sim_cmd->add_option("--errors", sim_errors, "Per-sample error CSV (needs --seed)");

  // sweep
  StepOptions sweep_opts;
  double sweep_t = 1.0;
  std::vector<std::size_t> sweep_n{50, 100, 200, 400, 800};
  std::size_t sweep_samples = 64;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Global error against n at fixed t");
  sweep_cmd->add_option("model", model_path, "Model JSON")->required();
  add_step_options(sweep_cmd, sweep_opts, false);
  sweep_cmd->add_option("--t", sweep_t, "Final time")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--n", sweep_n, "Step counts")->delimiter(',');
  sweep_cmd->add_option("--samples", sweep_samples, "Random states per point");
  sweep_cmd->add_option("--seed", sweep_seed, "Sampling seed")->required();
  sweep_cmd->add_option("-o,--output", sweep_out, "Sweep CSV (default: stdout)");

  // bounds
  StepOptions bounds_opts;
  std::optional<double> bounds_t;
  auto* bounds_cmd = app.add_subcommand("bounds", "Analytical error bounds for a compiled model");
  bounds_cmd->add_option("model", model_path, "Model JSON")->required();
  add_step_options(bounds_cmd, bounds_opts);
  bounds_cmd->add_option("--t", bounds_t, "Final time for the global bound");

  // resources
  StepOptions res_opts;
  std::optional<std::size_t> res_M, res_k, res_d;
  std::optional<double> res_R, res_J, res_Xi;
  double res_lambda = 1.0;
  double res_t = 1.0;
  double res_eps = 0.01;
  auto* res_cmd = app.add_subcommand("resources", "Ancilla and gate counts for a target accuracy");
  res_cmd->add_option("model", model_path, "Model JSON (or give --M --k --d --R)");
  add_step_options(res_cmd, res_opts);
  res_cmd->add_option("--M", res_M, "Number of subsystems");
  res_cmd->add_option("--k", res_k, "Locality");
  res_cmd->add_option("--d", res_d, "Local dimension");
  res_cmd->add_option("--R", res_R, "Generators per operator (default k)");
  res_cmd->add_option("--J", res_J, "GKS operators per term (default d^(2k) - 1)");
  res_cmd->add_option("--Xi", res_Xi, "Generators per step (default K J R)");
  res_cmd->add_option("--Lambda", res_lambda, "Largest generator norm");
  res_cmd->add_option("--t", res_t, "Final time")->check(CLI::PositiveNumber);
  res_cmd->add_option("--eps", res_eps, "Target global error")->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  }

  try {
    if (validate_cmd->parsed()) return cmd_validate(model_path, report_path, out);

    if (compile_cmd->parsed()) {
      const Loaded l = load_valid(model_path);
      const StepParams params = step_params(compile_opts, compile_opts.dt);
      print_warnings(params, err);
      const Compiled c = compile_model(l, compile_opts.mode(), params, err);
      if (compile_out.empty() || compile_out == "-") {
        out << emit_circuit(c.circuit);
      } else {
        write_file_or(compile_out, out, [&](std::ostream& os) { os << emit_circuit(c.circuit); });
        print_summary(c, out);
      }
      return kOk;
    }

    if (sim_cmd->parsed()) {
      const Loaded l = load_valid(model_path);
      EngineOptions eo;
      eo.dimension_cap = sim_opts.cap;
      CollisionCircuit circuit;
      if (!sim_circuit.empty()) {
        circuit = load_circuit(sim_circuit);
      } else {
        const StepParams params = step_params(sim_opts, sim_opts.dt);
        print_warnings(params, err);
        circuit = compile_model(l, sim_opts.mode(), params, err).circuit;
      }
      if (circuit.system_layout() != l.model.layout) {
        throw std::runtime_error("circuit and model have different system dimensions");
      }
      const double dt = circuit.params.dt;
      const std::size_t n = steps_for(sim_n, sim_t, dt);
      const Matrix rho0 = initial_state(sim_initial, l.model.layout);

      Trajectory traj;
      const bool scheduled = !l.doc.schedule.empty();
      if (scheduled) {
        traj = evolve_piecewise(schedule_time_dependent(circuit, to_schedule(l.doc)), rho0, n, eo);
      } else {
        traj = CollisionEngine(circuit, eo).evolve(rho0, n);
      }
      for (const auto& w : traj.warnings) err << "warning: " << w << '\n';
      const double t = traj.times.back();
      const Matrix& final_state = traj.states.back();

      out << "steps: " << n << "  dt: " << dt << "  t: " << t << '\n';
      out << "final populations:";
      for (Eigen::Index i = 0; i < final_state.rows(); ++i) out << ' ' << final_state(i, i).real();
      out << '\n';
      if (!sim_traj.empty()) {
        write_file_or(sim_traj, out, [&](std::ostream& os) {
          std::ostringstream cfg;
          cfg << std::setprecision(17) << "dt=" << dt << " n=" << n << " initial=" << sim_initial;
          write_trajectory_csv(os, traj, {cfg.str()});
        });
      }
      if (scheduled) {
        out << "exact comparison skipped for scheduled models\n";
        return kOk;
      }
      const Superoperator exact = semigroup(l.model, t, eo.dimension_cap);
      out << "trace-norm distance to exp(L t) rho0: "
          << trace_norm(exact.apply(rho0) - final_state) << '\n';
      if (sim_seed) {
        const ErrorReport rep = measure_errors(circuit, l.model, n, sim_samples, *sim_seed, eo);
        out << "sampled lower bounds (seed " << rep.seed << ", " << rep.samples
            << " states): eps_g " << rep.eps_g_lower << "  eps_s " << rep.eps_s_lower
            << "  eps_t " << rep.eps_t_lower << "  eps_c " << rep.eps_c_lower << '\n';
        if (!sim_errors.empty()) {
          write_file_or(sim_errors, out, [&](std::ostream& os) { write_error_csv(os, rep); });
        }
      } else if (!sim_errors.empty()) {
        throw UsageError("--errors needs --seed");
      }
      return kOk;
    }

    if (sweep_cmd->parsed()) {
      const Loaded l = load_valid(model_path);
      EngineOptions eo;
      eo.dimension_cap = sweep_opts.cap;
      const Mode mode = sweep_opts.mode();
      auto factory = [&](double dt) {
        std::ostringstream sink;
        return compile_model(l, mode, step_params(sweep_opts, dt), sink).circuit;
      };
      const SweepResult res =
          sweep_scaling(l.model, factory, sweep_t, sweep_n, sweep_samples, sweep_seed, eo);
      write_file_or(sweep_out, out, [&](std::ostream& os) { write_sweep_csv(os, res); });
      if (!sweep_out.empty() && sweep_out != "-") {
        out << "slope: " << res.fit.slope << (res.fit.degenerate ? " (degenerate)" : "") << '\n';
      }
      return kOk;
    }

    if (bounds_cmd->parsed()) {
      const Loaded l = load_valid(model_path);
      const StepParams params = step_params(bounds_opts, bounds_opts.dt);
      print_warnings(params, err);
      const Compiled c = compile_model(l, bounds_opts.mode(), params, err);
      const BoundInputs in =
          bound_inputs_from(c.circuit, static_cast<double>(klocal_terms(l.doc)));
      print_bounds(in, out);
      if (bounds_t) {
        const double n = std::round(*bounds_t / params.dt);
        out << "global bound n (eps_t + eps_c) at t=" << *bounds_t << ": "
            << n * (truncation_bound(in) + collision_bound(in)) << '\n';
      }
      return kOk;
    }

    if (res_cmd->parsed()) {
      BoundInputs in;
      bool has_h = false;
      std::optional<std::size_t> compiled_gates;
      if (!model_path.empty()) {
        const Loaded l = load_valid(model_path);
        const StepParams params = step_params(res_opts, res_opts.dt);
        const Compiled c = compile_model(l, res_opts.mode(), params, err);
        const std::size_t K = klocal_terms(l.doc);
        in = bound_inputs_from(c.circuit, static_cast<double>(K));
        if (l.doc.klocal && !l.doc.klocal->terms.empty()) {
          std::size_t jk = 0;
          for (const auto& term : l.doc.klocal->terms) jk = std::max(jk, term.ops.size());
          if (jk > 0) in.J = static_cast<double>(jk);
        }
        has_h = !c.circuit.system_gates.empty();
        compiled_gates = c.circuit.total_gate_count();
      } else {
        if (!res_M || !res_k || !res_d) throw UsageError("give a model or --M --k --d");
        const std::uint64_t K = klocal_count(*res_M, *res_k);
        in.K = static_cast<double>(K);
        const double d2k = std::pow(static_cast<double>(*res_d), 2.0 * static_cast<double>(*res_k));
        in.J = res_J.value_or(d2k - 1.0);
        in.R = res_R.value_or(static_cast<double>(*res_k));
        in.Lambda = res_lambda;
        in.Xi = res_Xi.value_or(in.K * in.J * in.R);
        in.gamma = res_opts.gamma;
        in.dt = res_opts.dt;
        in.g_I = std::sqrt(res_opts.gamma / res_opts.dt);
        in.g_S = res_opts.gs_ratio * in.g_I;
        in.a_max = in.R * in.Lambda;
        has_h = in.g_S > 0.0;
        out << "J_k upper limit (d^(2k) - 1): " << d2k - 1.0 << '\n';
      }
      const ResourceReport r = resources(in, has_h, res_t, res_eps);
      out << "K: " << r.K << "\nJ_k: " << r.J_k << "\nR: " << r.R << "\nN_G_S: " << r.N_G_S
          << "\nf(M): " << r.f_M << "\nt: " << r.t << "\neps_g: " << r.eps_g
          << "\nN_A: " << r.N_A << "\nN_G: " << r.N_G
          << "\ngates per step (formula): " << r.gates_per_step << '\n';
      if (compiled_gates) out << "gates per step (compiled): " << *compiled_gates << '\n';
      return kOk;
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidation;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const InfeasibleEngineering& e) {
    err << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kOk;
}

}  // namespace mcm::cli

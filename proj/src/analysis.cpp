#include "mcm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mcm {

namespace {

constexpr double kE = std::numbers::e;

std::uint64_t guarded_ceil(double x) {
  if (!std::isfinite(x) || x < 0.0) throw std::invalid_argument("count is not finite");
  // Absorb a few ulps of rounding noise so that exact integers are not bumped up.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x);
  return static_cast<std::uint64_t>(std::ceil(x - noise));
}

}  // namespace

void BoundInputs::check() const {
  for (double v : {Lambda, Xi, K, J, R, g_S, g_I, gamma, dt, a_max}) {
    if (!(v >= 0.0)) throw std::invalid_argument("bound inputs must be nonnegative");
  }
}

Prescriptions prescriptions(const BoundInputs& in) {
  Prescriptions p;
  const double rl = in.R * in.Lambda;
  p.truncation = 2.0 * rl * (1.0 + in.J * rl) * in.gamma * in.dt < 1.0;
  p.interaction = 4.0 * in.Xi * in.dt * in.g_I * in.Lambda < 1.0;
  p.system = 2.0 * in.dt * in.K * in.g_S * in.Lambda < 1.0;
  return p;
}

double truncation_bound(const BoundInputs& in) {
  const double rl = in.R * in.Lambda;
  const double x = in.K * rl * (1.0 + in.J * rl) * in.gamma * in.dt;
  return 2.0 * kE * x * x;
}

double truncation_bound_amax(const BoundInputs& in) {
  const double x = in.K * (in.a_max + in.J * in.a_max * in.a_max) * in.gamma * in.dt;
  return 2.0 * kE * x * x;
}

double pol1(const BoundInputs& in) {
  const double a = 2.0 * in.Xi * in.Lambda;
  const double b = 4.0 * in.Lambda;
  const double c = 2.0 * in.K * in.g_S * in.Lambda;
  return std::pow(a, 4) * in.gamma * in.gamma * std::cosh(0.5) / 24.0 +
         std::pow(b, 3) * in.Xi * in.Xi * in.g_S * in.K * in.gamma * std::sinh(1.0) / 2.0 +
         kE * c * c / 2.0;
}

double pol2(const BoundInputs& in) {
  const double kg = in.K * in.g_S;
  return std::pow(4.0 * in.Lambda, 4) * in.Xi * in.Xi * kg * kg * in.gamma * std::cosh(1.0) /
         24.0;
}

double collision_bound(const BoundInputs& in) {
  return pol1(in) * in.dt * in.dt + pol2(in) * in.dt * in.dt * in.dt;
}

double f_of_M(const BoundInputs& in) {
  const double rl = in.R * in.Lambda;
  const double x = in.K * rl * (1.0 + in.J * rl) * in.gamma;
  return pol1(in) + pol2(in) * in.dt + 2.0 * kE * x * x;
}

std::uint64_t ancilla_count(double K, double J, double f, double t, double eps_g) {
  if (!(eps_g > 0.0)) throw std::invalid_argument("ancilla_count: eps_g must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("ancilla_count: t must be positive");
  return guarded_ceil(K * J * f * t * t / eps_g);
}

std::uint64_t gate_count(double R, double K, double J, double N_G_S, double f, double t,
                         double eps_g) {
  if (!(eps_g > 0.0)) throw std::invalid_argument("gate_count: eps_g must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("gate_count: t must be positive");
  return guarded_ceil(((2.0 * R - 1.0) * K * J + N_G_S) * f * t * t / eps_g);
}

ResourceReport resources(const BoundInputs& in, bool has_hamiltonian, double t, double eps_g) {
  in.check();
  ResourceReport r;
  r.K = in.K;
  r.J_k = in.J;
  r.R = in.R;
  r.N_G_S = has_hamiltonian ? in.K : 0.0;
  r.f_M = f_of_M(in);
  r.t = t;
  r.eps_g = eps_g;
  r.N_A = ancilla_count(in.K, in.J, r.f_M, t, eps_g);
  r.N_G = gate_count(in.R, in.K, in.J, r.N_G_S, r.f_M, t, eps_g);
  r.gates_per_step = (2.0 * in.R - 1.0) * in.K * in.J + r.N_G_S;
  return r;
}

BoundInputs bound_inputs_from(const CollisionCircuit& circuit, double K) {
  BoundInputs in;
  in.K = K;
  // Without system gates the free evolution contributes nothing.
  in.g_S = circuit.system_gates.empty() ? 0.0 : circuit.params.g_S;
  in.g_I = circuit.params.g_I;
  in.gamma = circuit.params.gamma;
  in.dt = circuit.params.dt;

  const TensorLayout sys = circuit.system_layout();
  const auto D = static_cast<Eigen::Index>(sys.total_dim());
  Matrix h = Matrix::Zero(D, D);
  for (const auto& g : circuit.system_gates) {
    h += g.op.full(sys);
    in.Lambda = std::max(in.Lambda, op_norm(g.op.matrix));
  }
  const double h_norm = circuit.system_gates.empty() ? 0.0 : op_norm(h);
  in.Lambda = std::max(in.Lambda, h_norm);
  in.a_max = h_norm;

  std::map<std::size_t, double> per_ancilla_count;
  std::map<std::size_t, Matrix> per_ancilla_sum;
  for (const auto& g : circuit.gates) {
    in.Lambda = std::max(in.Lambda, op_norm(g.lambda * g.op.matrix));
    in.Xi += g.fraction;
    const std::size_t a = g.ancilla.value_or(0);
    per_ancilla_count[a] += g.fraction;
    auto [it, inserted] = per_ancilla_sum.try_emplace(a, Matrix::Zero(D, D));
    it->second += g.fraction * g.lambda * g.op.full(sys);
  }
  in.R = 1.0;
  for (const auto& [a, count] : per_ancilla_count) in.R = std::max(in.R, count);
  for (const auto& [a, sum] : per_ancilla_sum) in.a_max = std::max(in.a_max, op_norm(sum));

  const auto coeffs = induced_coefficients(circuit);
  in.J = static_cast<double>(circuit.targets.size());
  if (coeffs.absorption.size() > 0 && max_abs(coeffs.absorption) > 0.0) in.J *= 2.0;
  return in;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double zero_floor) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_loglog: size mismatch");
  SlopeFit fit;
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > zero_floor)) {
      fit.degenerate = true;
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  if (lx.size() < 2) {
    fit.degenerate = true;
    return fit;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

SweepResult sweep_scaling(const GKLSModel& model, const CircuitFactory& factory, double t,
                          const std::vector<std::size_t>& n_values, std::size_t samples,
                          std::uint64_t seed, const EngineOptions& options) {
  if (!(t > 0.0)) throw std::invalid_argument("sweep_scaling: t must be positive");
  if (n_values.empty()) throw std::invalid_argument("sweep_scaling: no n values");
  SweepResult out;
  out.seed = seed;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t n : n_values) {
    if (n == 0) throw std::invalid_argument("sweep_scaling: n must be >= 1");
    const double dt = t / static_cast<double>(n);
    const CollisionCircuit circuit = factory(dt);
    const ErrorReport report = measure_errors(circuit, model, n, samples, seed, options);
    const BoundInputs in = bound_inputs_from(circuit);
    out.rows.push_back({n, dt, report.eps_g_lower, report.eps_s_lower, truncation_bound(in),
                        collision_bound(in)});
    xs.push_back(static_cast<double>(n));
    ys.push_back(report.eps_g_lower);
  }
  out.fit = fit_loglog(xs, ys);
  return out;
}

void write_sweep_csv(std::ostream& os, const SweepResult& sweep) {
  os << std::setprecision(17);
  os << "# mcm-sweep v1\n";
  os << "# seed=" << sweep.seed << '\n';
  os << "# slope=" << sweep.fit.slope << " intercept=" << sweep.fit.intercept
     << " residual=" << sweep.fit.residual
     << " degenerate=" << (sweep.fit.degenerate ? "true" : "false") << '\n';
  os << "# eps columns are sampled lower bounds\n";
  os << "n,dt,eps_g_lower,eps_s_lower,trunc_bound,coll_bound\n";
  for (const auto& r : sweep.rows) {
    os << r.n << ',' << r.dt << ',' << r.eps_g_lower << ',' << r.eps_s_lower << ','
       << r.trunc_bound << ',' << r.coll_bound << '\n';
  }
}

}  // namespace mcm

#include "mcm/engine.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

namespace mcm {

Matrix gate_unitary(const CollisionCircuit& circuit, const ElementaryGate& gate) {
  const double g = gate.coupling == Coupling::kSystem ? circuit.params.g_S : circuit.params.g_I;
  const double angle = g * gate.fraction * circuit.params.dt;
  return matrix_exp(Complex(0.0, -angle) * circuit.local_generator(gate));
}

StepUnitary build_step_unitary(const CollisionCircuit& circuit, const EngineOptions& options) {
  circuit.check();
  const std::size_t n = circuit.layout.total_dim();
  if (n > options.dimension_cap) {
    throw CapExceeded("joint dimension " + std::to_string(n) + " exceeds cap " +
                      std::to_string(options.dimension_cap));
  }
  if (options.unsplit) {
    Matrix h = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    auto add = [&](const ElementaryGate& g) {
      const double scale =
          (g.coupling == Coupling::kSystem ? circuit.params.g_S : circuit.params.g_I) * g.fraction;
      h += scale * embed(circuit.local_generator(g), circuit.joint_sites(g), circuit.layout);
    };
    for (const auto& gate : circuit.gates) add(gate);
    for (const auto& g : circuit.system_gates) add(g);
    return {matrix_exp(Complex(0.0, -circuit.params.dt) * h)};
  }
  Matrix u = identity(n);
  for (const auto& gate : circuit.gates) {
    u = apply_local_left(gate_unitary(circuit, gate), circuit.joint_sites(gate), circuit.layout, u);
  }
  for (const auto& sg : circuit.system_gates) {
    u = apply_local_left(gate_unitary(circuit, sg), circuit.joint_sites(sg), circuit.layout, u);
  }
  return {std::move(u)};
}

Matrix environment_state(const CollisionCircuit& circuit) {
  Matrix env = Matrix::Identity(1, 1);
  for (const auto& anc : circuit.ancillas) {
    Matrix eta = Matrix::Zero(2, 2);
    eta(0, 0) = 1.0 - anc.c;  // |up>
    eta(1, 1) = anc.c;        // |down>
    env = kron(env, eta);
  }
  return env;
}

CollisionEngine::CollisionEngine(CollisionCircuit circuit, EngineOptions options)
    : circuit_(std::move(circuit)), options_(std::move(options)) {
  unitary_ = build_step_unitary(circuit_, options_);
  environment_ = environment_state(circuit_);
  system_sites_.resize(circuit_.system_factors);
  for (std::size_t i = 0; i < system_sites_.size(); ++i) system_sites_[i] = i;
}

std::string CollisionEngine::density_issue(const Matrix& rho) const {
  const auto D = static_cast<Eigen::Index>(circuit_.system_dim());
  if (rho.rows() != D || rho.cols() != D) return "wrong dimension";
  const double dev = std::abs(rho.trace() - 1.0);
  if (dev > options_.tol.density_trace) {
    std::ostringstream os;
    os << "trace deviates from 1 by " << dev;
    return os.str();
  }
  return {};
}

namespace {

void require_system_shape(const Matrix& x, std::size_t dim) {
  const auto D = static_cast<Eigen::Index>(dim);
  if (x.rows() != D || x.cols() != D) {
    throw DimensionError("step: operator is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", system dimension is " +
                         std::to_string(D));
  }
}

}  // namespace

Matrix CollisionEngine::step_linear(const Matrix& x) const {
  require_system_shape(x, circuit_.system_dim());
  const Matrix joint = kron(x, environment_);
  const Matrix& u = unitary_.matrix;
  const Matrix evolved = u * joint * u.adjoint();
  return partial_trace(evolved, circuit_.layout, system_sites_);
}

Matrix CollisionEngine::step(const Matrix& rho) const {
  require_system_shape(rho, circuit_.system_dim());
  if (options_.strict_density_check) {
    if (auto issue = density_issue(rho); !issue.empty()) {
      throw std::invalid_argument("step: input is not a density operator (" + issue + ")");
    }
  }
  return step_linear(rho);
}

Trajectory CollisionEngine::evolve(const Matrix& rho0, std::size_t n_steps) const {
  Trajectory traj;
  if (auto issue = density_issue(rho0); !issue.empty()) {
    if (options_.strict_density_check) {
      throw std::invalid_argument("evolve: initial state is not a density operator (" +
                                  issue + ")");
    }
    traj.warnings.push_back("initial state: " + issue);
  }
  traj.times.reserve(n_steps + 1);
  traj.states.reserve(n_steps + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  for (std::size_t k = 1; k <= n_steps; ++k) {
    traj.states.push_back(step_linear(traj.states.back()));
    traj.times.push_back(static_cast<double>(k) * circuit_.params.dt);
  }
  return traj;
}

Superoperator CollisionEngine::extract_map() const {
  const std::size_t D = circuit_.system_dim();
  if (D * D > options_.dimension_cap) {
    throw CapExceeded("superoperator dimension " + std::to_string(D * D) + " exceeds cap " +
                      std::to_string(options_.dimension_cap));
  }
  const auto d = static_cast<Eigen::Index>(D);
  Superoperator phi{Matrix::Zero(d * d, d * d), D};
  for (Eigen::Index b = 0; b < d; ++b) {
    for (Eigen::Index a = 0; a < d; ++a) {
      Matrix unit = Matrix::Zero(d, d);
      unit(a, b) = 1.0;
      phi.matrix.col(a + b * d) = vec(step_linear(unit));
    }
  }
  return phi;
}

Trajectory evolve_piecewise(const PiecewiseCircuit& pc, const Matrix& rho0,
                            std::size_t n_steps, const EngineOptions& options) {
  std::vector<CollisionEngine> engines;
  engines.reserve(pc.circuits.size());
  for (const auto& c : pc.circuits) engines.emplace_back(c, options);
  Trajectory traj;
  if (auto issue = engines.front().density_issue(rho0); !issue.empty()) {
    traj.warnings.push_back("initial state: " + issue);
  }
  traj.times.push_back(0.0);
  traj.states.push_back(rho0);
  const double dt = pc.circuits.front().params.dt;
  for (std::size_t k = 0; k < n_steps; ++k) {
    const auto& engine = engines[pc.segment_for_step(k)];
    traj.states.push_back(engine.step_linear(traj.states.back()));
    traj.times.push_back(static_cast<double>(k + 1) * dt);
  }
  return traj;
}

double symmetrization_defect(const CollisionCircuit& circuit, std::size_t ancilla) {
  std::vector<std::size_t> dims(circuit.layout.dims().begin(),
                                circuit.layout.dims().begin() +
                                    static_cast<long>(circuit.system_factors));
  dims.push_back(2);
  const TensorLayout local(dims);
  const std::size_t anc_site = circuit.system_factors;
  const auto n = static_cast<Eigen::Index>(local.total_dim());

  Matrix product = Matrix::Identity(n, n);
  Matrix summed = Matrix::Zero(n, n);
  for (const auto& gate : circuit.gates) {
    if (gate.ancilla != ancilla) continue;
    std::vector<std::size_t> sites = gate.op.sites;
    sites.push_back(anc_site);
    product = apply_local_left(gate_unitary(circuit, gate), sites, local, product);
    summed += gate.fraction * embed(circuit.local_generator(gate), sites, local);
  }
  const Matrix exact =
      matrix_exp(Complex(0.0, -circuit.params.g_I * circuit.params.dt) * summed);
  return op_norm(product - exact);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& header_comments) {
  os << "# mcm-trajectory v1\n";
  for (const auto& line : header_comments) os << "# " << line << '\n';
  const Eigen::Index D = traj.states.empty() ? 0 : traj.states.front().rows();
  os << "step,t";
  for (Eigen::Index i = 0; i < D; ++i) {
    for (Eigen::Index j = 0; j < D; ++j) {
      os << ",re_" << i << '_' << j << ",im_" << i << '_' << j;
    }
  }
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    os << k << ',' << traj.times[k];
    const Matrix& rho = traj.states[k];
    for (Eigen::Index i = 0; i < D; ++i) {
      for (Eigen::Index j = 0; j < D; ++j) {
        os << ',' << rho(i, j).real() << ',' << rho(i, j).imag();
      }
    }
    os << '\n';
  }
}

}  // namespace mcm

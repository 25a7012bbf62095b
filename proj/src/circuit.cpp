#include "mcm/circuit.hpp"

#include <cmath>
#include <sstream>

namespace mcm {

StepParams StepParams::from_gamma(double gamma, double dt, double gs_ratio) {
  if (!(dt > 0.0)) throw std::invalid_argument("StepParams: dt must be positive");
  if (gamma < 0.0) throw std::invalid_argument("StepParams: gamma must be nonnegative");
  StepParams p;
  p.dt = dt;
  p.gamma = gamma;
  p.g_I = std::sqrt(gamma / dt);
  p.g_S = gs_ratio * p.g_I;
  return p;
}

StepParams StepParams::from_couplings(double g_I, double g_S, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("StepParams: dt must be positive");
  StepParams p;
  p.dt = dt;
  p.g_I = g_I;
  p.g_S = g_S;
  p.gamma = g_I * g_I * dt;
  return p;
}

std::vector<std::string> StepParams::warnings(const Tolerances& tol) const {
  std::vector<std::string> out;
  if (g_I > 0.0 && g_S / g_I > tol.gs_over_gi_warning) {
    std::ostringstream os;
    os << "g_S/g_I = " << g_S / g_I << " exceeds " << tol.gs_over_gi_warning;
    out.push_back(os.str());
  }
  if (gamma * dt > tol.gamma_dt_warning) {
    std::ostringstream os;
    os << "gamma*dt = " << gamma * dt << " exceeds " << tol.gamma_dt_warning;
    out.push_back(os.str());
  }
  return out;
}

TensorLayout CollisionCircuit::system_layout() const {
  return TensorLayout(std::vector<std::size_t>(
      layout.dims().begin(), layout.dims().begin() + static_cast<long>(system_factors)));
}

std::size_t CollisionCircuit::system_dim() const { return system_layout().total_dim(); }

Matrix CollisionCircuit::local_generator(const ElementaryGate& gate) const {
  if (gate.coupling == Coupling::kSystem) return gate.op.matrix;
  return gate.lambda * kron(gate.op.matrix, sigma_plus()) +
         std::conj(gate.lambda) * kron(gate.op.matrix.adjoint(), sigma_minus());
}

std::vector<std::size_t> CollisionCircuit::joint_sites(const ElementaryGate& gate) const {
  std::vector<std::size_t> sites = gate.op.sites;
  if (gate.ancilla) sites.push_back(ancilla_site(*gate.ancilla));
  return sites;
}

void CollisionCircuit::check() const {
  if (layout.size() != system_factors + ancillas.size()) {
    throw DimensionError("circuit layout has " + std::to_string(layout.size()) +
                         " factors, expected system + one per ancilla");
  }
  for (std::size_t a = 0; a < ancillas.size(); ++a) {
    if (layout.dim(system_factors + a) != 2) {
      throw DimensionError("ancilla factors must be qubits");
    }
    const auto& anc = ancillas[a];
    if (anc.id != a) throw std::invalid_argument("ancilla ids must equal their position");
    if (!(anc.c >= 0.0 && anc.c <= 1.0)) {
      throw std::invalid_argument("ancilla " + std::to_string(a) + " population outside [0,1]");
    }
    for (const auto& cp : anc.couplings) {
      if (cp.target >= targets.size()) {
        throw std::invalid_argument("ancilla coupling references missing target");
      }
    }
  }
  const TensorLayout sys = system_layout();
  for (const auto& t : targets) t.check(sys);
  for (const auto& g : gates) {
    if (g.coupling != Coupling::kInteraction || !g.ancilla) {
      throw std::invalid_argument("interaction gates need an ancilla");
    }
    if (*g.ancilla >= ancillas.size()) {
      throw std::invalid_argument("gate references missing ancilla");
    }
    if (g.fraction != 0.5 && g.fraction != 1.0) {
      throw std::invalid_argument("gate fraction must be 1/2 or 1");
    }
    g.op.check(sys);
  }
  for (const auto& g : system_gates) {
    if (g.coupling != Coupling::kSystem || g.ancilla) {
      throw std::invalid_argument("system gate must act on the system only");
    }
    if (g.fraction != 1.0) throw std::invalid_argument("system gate fraction must be 1");
    g.op.check(sys);
  }
}

Matrix pair_contribution(const AncillaSpec& ancilla) {
  const auto n = static_cast<Eigen::Index>(ancilla.couplings.size());
  Matrix v(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) {
      v(x, y) = ancilla.c * ancilla.couplings[x].lambda *
                std::conj(ancilla.couplings[y].lambda);
    }
  }
  return v;
}

InducedCoefficients induced_coefficients(const CollisionCircuit& circuit) {
  const auto J = static_cast<Eigen::Index>(circuit.targets.size());
  InducedCoefficients out{Matrix::Zero(J, J), Matrix::Zero(J, J)};
  const double gamma = circuit.params.gamma;
  for (const auto& anc : circuit.ancillas) {
    for (const auto& x : anc.couplings) {
      for (const auto& y : anc.couplings) {
        const auto tx = static_cast<Eigen::Index>(x.target);
        const auto ty = static_cast<Eigen::Index>(y.target);
        out.emission(tx, ty) += gamma * anc.c * x.lambda * std::conj(y.lambda);
        out.absorption(tx, ty) += gamma * (1.0 - anc.c) * std::conj(x.lambda) * y.lambda;
      }
    }
  }
  return out;
}

double coupling_realization_residual(const CollisionCircuit& circuit) {
  const TensorLayout sys = circuit.system_layout();
  const auto D = static_cast<Eigen::Index>(sys.total_dim());
  double worst = 0.0;
  for (const auto& anc : circuit.ancillas) {
    Matrix from_gates = Matrix::Zero(D, D);
    for (const auto& g : circuit.gates) {
      if (g.ancilla == anc.id) from_gates += g.fraction * g.lambda * g.op.full(sys);
    }
    Matrix declared = Matrix::Zero(D, D);
    for (const auto& cp : anc.couplings) {
      declared += cp.lambda * circuit.targets[cp.target].full(sys);
    }
    worst = std::max(worst, max_abs(from_gates - declared));
  }
  return worst;
}

GKLSModel induced_model(const CollisionCircuit& circuit) {
  const auto coeffs = induced_coefficients(circuit);
  GKLSModel m;
  m.layout = circuit.system_layout();
  const auto D = static_cast<Eigen::Index>(m.layout.total_dim());
  m.hamiltonian = Matrix::Zero(D, D);
  for (const auto& g : circuit.system_gates) {
    m.hamiltonian += circuit.params.g_S * g.op.full(m.layout);
  }
  m.gks_ops = circuit.targets;
  const bool absorbs = max_abs(coeffs.absorption) > 0.0;
  if (absorbs) {
    for (const auto& t : circuit.targets) m.gks_ops.push_back(t.adjoint());
    m.kossakowski = direct_sum(coeffs.emission, coeffs.absorption);
  } else {
    m.kossakowski = coeffs.emission;
  }
  return m;
}

}  // namespace mcm

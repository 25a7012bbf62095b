#include "mcm/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/QR>

namespace mcm {
namespace {

// Emits the symmetrized sequence for one ancilla. `ops` is ordered outermost
// first: ops[0](1/2) ... ops[R-2](1/2) ops[R-1](1) ops[R-2](1/2) ... ops[0](1/2).
void emit_palindrome(std::vector<ElementaryGate>& gates,
                     const std::vector<std::pair<LocalOperator, Complex>>& ops,
                     std::size_t ancilla) {
  if (ops.empty()) return;
  auto gate = [&](std::size_t i, double fraction) {
    gates.push_back(ElementaryGate{ops[i].first, ops[i].second, ancilla, fraction,
                                   Coupling::kInteraction});
  };
  const std::size_t last = ops.size() - 1;
  for (std::size_t i = 0; i < last; ++i) gate(i, 0.5);
  gate(last, 1.0);
  for (std::size_t i = last; i-- > 0;) gate(i, 0.5);
}

CollisionCircuit skeleton(const TensorLayout& system, std::size_t n_ancillas,
                          const StepParams& params) {
  CollisionCircuit c;
  c.system_factors = system.size();
  std::vector<std::size_t> extra(n_ancillas, 2);
  c.layout = system.appended(extra);
  c.params = params;
  return c;
}

std::string op_name(const LocalOperator& op, std::size_t j) {
  return op.label.empty() ? "F" + std::to_string(j) : op.label;
}

void require_qubits(const TensorLayout& system, std::span<const std::size_t> sites) {
  system.check_sites(sites);
  for (std::size_t s : sites) {
    if (system.dim(s) != 2) {
      throw DimensionError("site " + std::to_string(s) + " is not a qubit");
    }
  }
}

}  // namespace

std::vector<ElementaryGate> system_gates(const Matrix& hamiltonian, const TensorLayout& system,
                                         const StepParams& params,
                                         const std::optional<KLocality>& klocal) {
  if (hamiltonian.size() == 0 || max_abs(hamiltonian) == 0.0) return {};
  if (!(params.g_S > 0.0)) {
    throw std::invalid_argument("a nonzero system Hamiltonian needs g_S > 0");
  }
  auto gate = [&](std::vector<std::size_t> sites, Matrix m, std::string label) {
    return ElementaryGate{LocalOperator{std::move(sites), m / params.g_S, std::move(label)},
                          Complex{1.0, 0.0}, std::nullopt, 1.0, Coupling::kSystem};
  };
  std::vector<std::size_t> all(system.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;

  const bool qubits = std::all_of(system.dims().begin(), system.dims().end(),
                                  [](std::size_t d) { return d == 2; });
  if (!klocal || klocal->terms.empty() || !qubits || system.size() > 8) {
    return {gate(all, hamiltonian, "H_S")};
  }

  // Pauli expansion; each string goes to the first term whose sites cover it.
  const std::size_t M = system.size();
  const double D = static_cast<double>(system.total_dim());
  const Matrix paulis[4] = {identity(2), pauli_x(), pauli_y(), pauli_z()};
  std::vector<Matrix> pieces;
  for (const auto& term : klocal->terms) {
    const auto n = static_cast<Eigen::Index>(system.dim_of(term.sites));
    pieces.push_back(Matrix::Zero(n, n));
  }
  std::vector<int> letters(M, 0);
  for (std::size_t code = 1; code < (std::size_t{1} << (2 * M)); ++code) {
    for (std::size_t m = 0; m < M; ++m) letters[m] = static_cast<int>((code >> (2 * (M - 1 - m))) & 3u);
    std::vector<Matrix> factors;
    std::vector<std::size_t> support;
    for (std::size_t m = 0; m < M; ++m) {
      factors.push_back(paulis[letters[m]]);
      if (letters[m] != 0) support.push_back(m);
    }
    const Complex coef = (kron_all(factors) * hamiltonian).trace() / D;
    if (std::abs(coef) < 1e-14 * std::max(1.0, max_abs(hamiltonian))) continue;
    std::size_t owner = klocal->terms.size();
    for (std::size_t s = 0; s < klocal->terms.size(); ++s) {
      const auto& ts = klocal->terms[s].sites;
      if (std::includes(ts.begin(), ts.end(), support.begin(), support.end())) {
        owner = s;
        break;
      }
    }
    if (owner == klocal->terms.size()) return {gate(all, hamiltonian, "H_S")};
    std::vector<Matrix> local;
    for (std::size_t site : klocal->terms[owner].sites) local.push_back(paulis[letters[site]]);
    pieces[owner] += coef * kron_all(local);
  }
  std::vector<ElementaryGate> out;
  for (std::size_t s = 0; s < pieces.size(); ++s) {
    if (max_abs(pieces[s]) == 0.0) continue;
    out.push_back(gate(klocal->terms[s].sites, pieces[s], "H_S" + std::to_string(s)));
  }
  return out;
}

Matrix ManyBodyDecomposition::reassembled(const TensorLayout& layout) const {
  const auto D = static_cast<Eigen::Index>(layout.total_dim());
  Matrix sum = Matrix::Zero(D, D);
  for (std::size_t r = 0; r < basis.size(); ++r) sum += mu[r] * basis[r].full(layout);
  return sum;
}

ManyBodyDecomposition decompose_manybody(const LocalOperator& target, Complex lambda,
                                         std::vector<LocalOperator> basis,
                                         const TensorLayout& layout,
                                         const Tolerances& tol) {
  if (basis.empty()) throw std::invalid_argument("decompose_manybody: empty basis");
  target.check(layout);
  std::vector<LocalOperator> all = basis;
  all.push_back(target);
  const auto support = union_of_sites(all);
  const auto n = static_cast<Eigen::Index>(layout.dim_of(support));

  Matrix A(n * n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t r = 0; r < basis.size(); ++r) {
    basis[r].check(layout);
    const Matrix ext = basis[r].extended_to(support, layout).matrix;
    A.col(static_cast<Eigen::Index>(r)) = ext.reshaped();
  }
  const Matrix t_ext = lambda * target.extended_to(support, layout).matrix;
  const Vector b = t_ext.reshaped();
  const Vector mu = A.completeOrthogonalDecomposition().solve(b);
  const double residual = (A * mu - b).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (residual > tol.span_residual * scale) {
    std::ostringstream os;
    os << "decompose_manybody: basis does not span the target (residual " << residual << ")";
    throw std::invalid_argument(os.str());
  }
  ManyBodyDecomposition d;
  d.target = target;
  d.lambda = lambda;
  d.basis = std::move(basis);
  d.mu.assign(mu.data(), mu.data() + mu.size());
  d.residual = residual;
  return d;
}

CollisionCircuit compile_nondiagonal(const GKLSModel& model, const StepParams& params,
                                     const Tolerances& tol) {
  auto report = validate(model, tol);
  if (!report.accepted()) {
    std::string what = "compile_nondiagonal: model failed validation (" + report.first_failure()->name + ")";
    throw ValidationError(what, std::move(report));
  }
  const std::size_t J = model.num_ops();
  const Matrix& g = model.kossakowski;
  const double scale = J > 0 ? max_abs(g) : 0.0;
  const double floor = tol.rate_floor_relative * scale;

  std::vector<double> residual(J, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    double r = g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    for (std::size_t k = 0; k < J; ++k) {
      if (k != j) r -= std::abs(g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
    }
    if (r < -std::max(tol.psd, floor)) {
      std::ostringstream os;
      os << "non-diagonal engineering infeasible: operator " << j << " ("
         << op_name(model.gks_ops[j], j) << ") has residual diagonal weight " << r
         << " < 0; the Kossakowski matrix is not diagonally dominant. "
         << "Use compile_diagonal (CLI: --diagonal or --auto).";
      throw InfeasibleEngineering(os.str(), j, r);
    }
    residual[j] = std::max(r, 0.0);
  }
  if (scale > 0.0 && !(params.gamma > 0.0)) {
    throw std::invalid_argument("compile_nondiagonal: gamma must be positive");
  }

  struct Plan {
    std::size_t j, k;
  };
  std::vector<Plan> plan;
  for (std::size_t j = 0; j < J; ++j) {
    if (residual[j] > floor) plan.push_back({j, j});
    for (std::size_t k = j + 1; k < J; ++k) {
      if (std::abs(g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) > floor) {
        plan.push_back({j, k});
      }
    }
  }

  CollisionCircuit c = skeleton(model.layout, plan.size(), params);
  c.targets = model.gks_ops;
  for (std::size_t a = 0; a < plan.size(); ++a) {
    const auto [j, k] = plan[a];
    AncillaSpec anc;
    anc.id = a;
    anc.c = 1.0;
    anc.label = "(" + op_name(model.gks_ops[j], j) + "," + op_name(model.gks_ops[k], k) + ")";
    if (j == k) {
      const Complex lam = std::sqrt(residual[j] / params.gamma);
      anc.couplings.push_back({j, lam});
      emit_palindrome(c.gates, {{model.gks_ops[j], lam}}, a);
    } else {
      const Complex gjk = g(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
      const double mag = std::sqrt(std::abs(gjk) / params.gamma);
      const Complex lam_j = std::polar(mag, std::arg(gjk));
      const Complex lam_k = mag;
      anc.couplings.push_back({j, lam_j});
      anc.couplings.push_back({k, lam_k});
      emit_palindrome(c.gates, {{model.gks_ops[j], lam_j}, {model.gks_ops[k], lam_k}}, a);
    }
    c.ancillas.push_back(std::move(anc));
  }
  c.system_gates = system_gates(model.hamiltonian, model.layout, params, model.klocal);
  return c;
}

CollisionCircuit compile_diagonal(const DiagonalModel& dm, const StepParams& params,
                                  const std::map<std::size_t, ManyBodyDecomposition>&
                                      decompositions) {
  const std::size_t K = dm.lindblad_ops.size();
  if (dm.rates.size() != K) {
    throw std::invalid_argument("compile_diagonal: rates and Lindblad operators differ in count");
  }
  if (K > 0 && !(params.gamma > 0.0)) {
    throw std::invalid_argument("compile_diagonal: gamma must be positive");
  }
  CollisionCircuit c = skeleton(dm.layout, K, params);
  c.targets = dm.lindblad_ops;
  for (std::size_t k = 0; k < K; ++k) {
    const double lam = std::sqrt(std::max(dm.rates[k], 0.0) / params.gamma);
    std::vector<std::pair<LocalOperator, Complex>> comps;
    if (auto it = decompositions.find(k); it != decompositions.end()) {
      const auto& d = it->second;
      const double mismatch =
          max_abs(d.target.full(dm.layout) - dm.lindblad_ops[k].full(dm.layout));
      if (mismatch > 1e-9 * std::max(1.0, max_abs(dm.lindblad_ops[k].matrix))) {
        throw std::invalid_argument("compile_diagonal: decomposition " + std::to_string(k) +
                                    " targets a different operator");
      }
      if (d.lambda == 0.0) throw std::invalid_argument("decomposition with zero lambda");
      for (std::size_t r = 0; r < d.basis.size(); ++r) {
        comps.emplace_back(d.basis[r], d.mu[r] * (lam / d.lambda));
      }
    } else if (k < dm.components.size() && !dm.components[k].empty()) {
      for (const auto& comp : dm.components[k]) comps.emplace_back(comp, lam);
    } else if (dm.lindblad_ops[k].sites.size() <= 1) {
      comps.emplace_back(dm.lindblad_ops[k], lam);
    } else {
      throw MissingDecomposition("compile_diagonal: Lindblad operator " + std::to_string(k) +
                                 " acts on several subsystems and has no decomposition");
    }
    // Components are stored by ascending support; the first one sits in the
    // middle of the palindrome.
    std::reverse(comps.begin(), comps.end());
    emit_palindrome(c.gates, comps, k);

    AncillaSpec anc;
    anc.id = k;
    anc.c = 1.0;
    anc.label = dm.lindblad_ops[k].label.empty() ? "L" + std::to_string(k)
                                                 : dm.lindblad_ops[k].label;
    anc.couplings.push_back({k, lam});
    c.ancillas.push_back(std::move(anc));
  }
  c.system_gates = system_gates(dm.hamiltonian, dm.layout, params, dm.klocal);
  return c;
}

Temperature Temperature::finite(double T) {
  if (T == 0.0) return zero();
  if (std::isinf(T)) return infinite();
  return {Kind::kFinite, T};
}

double thermal_occupation(double omega, const Temperature& T) {
  if (!(omega > 0.0)) throw std::invalid_argument("thermal bath needs omega > 0");
  switch (T.kind) {
    case Temperature::Kind::kZero:
      return 0.0;
    case Temperature::Kind::kInfinite:
      return std::numeric_limits<double>::infinity();
    case Temperature::Kind::kFinite:
      break;
  }
  return 1.0 / std::expm1(omega / T.value);
}

ThermalEngineering engineer_thermal(const ThermalBath& bath, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("engineer_thermal: gamma must be positive");
  const double n = thermal_occupation(bath.omega, bath.temperature);
  ThermalEngineering e{};
  e.occupation = n;
  if (std::isinf(n)) {
    // Equal emission and absorption at rate gamma0.
    e.c = 0.5;
    e.lambda = std::sqrt(2.0 * bath.gamma0 / gamma);
    e.emission = bath.gamma0;
    e.absorption = bath.gamma0;
    return e;
  }
  // For negative temperatures n < -1 and both fractions stay in [0,1].
  e.c = (n + 1.0) / (2.0 * n + 1.0);
  e.lambda = std::sqrt(std::abs(2.0 * n + 1.0) * bath.gamma0 / gamma);
  e.emission = bath.gamma0 * std::abs(n + 1.0);
  e.absorption = bath.gamma0 * std::abs(n);
  return e;
}

CollisionCircuit compile_thermal(const ThermalBath& bath, const TensorLayout& system,
                                 const StepParams& params,
                                 const std::optional<Matrix>& hamiltonian) {
  if (bath.sites.empty()) throw std::invalid_argument("compile_thermal: no target sites");
  require_qubits(system, bath.sites);
  const auto eng = engineer_thermal(bath, params.gamma);

  CollisionCircuit c = skeleton(system, 1, params);
  AncillaSpec anc;
  anc.id = 0;
  anc.c = eng.c;
  anc.label = "thermal";
  std::vector<std::pair<LocalOperator, Complex>> ops;
  for (std::size_t i = 0; i < bath.sites.size(); ++i) {
    LocalOperator sm{{bath.sites[i]}, sigma_minus(), "sm" + std::to_string(bath.sites[i])};
    c.targets.push_back(sm);
    anc.couplings.push_back({i, eng.lambda});
    ops.emplace_back(std::move(sm), eng.lambda);
  }
  emit_palindrome(c.gates, ops, 0);
  c.ancillas.push_back(std::move(anc));
  if (hamiltonian) c.system_gates = system_gates(*hamiltonian, system, params);
  return c;
}

GKLSModel thermal_target_model(const ThermalBath& bath, const TensorLayout& system,
                               const std::optional<Matrix>& hamiltonian) {
  require_qubits(system, bath.sites);
  const ThermalEngineering eng = engineer_thermal(bath, 1.0);
  GKLSModel m;
  m.layout = system;
  const auto D = static_cast<Eigen::Index>(system.total_dim());
  m.hamiltonian = hamiltonian ? *hamiltonian : Matrix::Zero(D, D);
  for (std::size_t s : bath.sites) {
    m.gks_ops.push_back({{s}, sigma_minus(), "sm" + std::to_string(s)});
  }
  for (std::size_t s : bath.sites) {
    m.gks_ops.push_back({{s}, sigma_plus(), "sp" + std::to_string(s)});
  }
  const auto n = static_cast<Eigen::Index>(bath.sites.size());
  m.kossakowski = direct_sum(Matrix::Constant(n, n, eng.emission),
                             Matrix::Constant(n, n, eng.absorption));
  return m;
}

CollisionCircuit compile_common_bath(std::size_t sites, std::span<const double> weights,
                                     const StepParams& params,
                                     const std::optional<Matrix>& hamiltonian) {
  if (sites == 0) throw std::invalid_argument("compile_common_bath: need at least one site");
  if (weights.size() != sites) {
    throw std::invalid_argument("compile_common_bath: one weight per site required");
  }
  const TensorLayout system = TensorLayout::uniform(sites, 2);
  CollisionCircuit c = skeleton(system, 1, params);
  AncillaSpec anc;
  anc.id = 0;
  anc.c = 1.0;
  anc.label = "common";
  std::vector<std::pair<LocalOperator, Complex>> ops;
  for (std::size_t m = 0; m < sites; ++m) {
    c.targets.push_back({{m}, sigma_minus(), "sm" + std::to_string(m)});
    if (weights[m] == 0.0) continue;
    anc.couplings.push_back({m, weights[m]});
  }
  // Site 0 is the centre of the palindrome.
  for (std::size_t m = sites; m-- > 0;) {
    if (weights[m] != 0.0) ops.emplace_back(c.targets[m], weights[m]);
  }
  emit_palindrome(c.gates, ops, 0);
  c.ancillas.push_back(std::move(anc));
  if (hamiltonian) c.system_gates = system_gates(*hamiltonian, system, params);
  return c;
}

std::size_t PiecewiseCircuit::segment_for_step(std::size_t n) const {
  if (circuits.empty()) throw std::out_of_range("empty piecewise circuit");
  const double dt = circuits.front().params.dt;
  // Guard against n*dt landing a rounding error below a boundary.
  const double t = static_cast<double>(n) * dt + 1e-9 * dt;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (t >= segments[s].t_start && t < segments[s].t_end) return s;
  }
  return segments.size() - 1;
}

PiecewiseCircuit schedule_time_dependent(const CollisionCircuit& base,
                                         std::vector<ScheduleSegment> schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule: no segments");
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
  };
  if (!close(schedule.front().t_start, 0.0)) {
    throw std::invalid_argument("schedule: first segment must start at t = 0");
  }
  for (std::size_t s = 0; s < schedule.size(); ++s) {
    if (!(schedule[s].t_end > schedule[s].t_start)) {
      throw std::invalid_argument("schedule: segment " + std::to_string(s) + " is empty");
    }
    if (s + 1 < schedule.size() && !close(schedule[s].t_end, schedule[s + 1].t_start)) {
      throw std::invalid_argument(schedule[s].t_end < schedule[s + 1].t_start
                                      ? "schedule: gap after segment " + std::to_string(s)
                                      : "schedule: overlap after segment " + std::to_string(s));
    }
  }

  PiecewiseCircuit out;
  for (const auto& seg : schedule) {
    CollisionCircuit c = base;
    for (const auto& ov : seg.lambda_overrides) {
      if (ov.ancilla && *ov.ancilla >= c.ancillas.size()) {
        throw std::invalid_argument("schedule: override references missing ancilla");
      }
      for (auto& anc : c.ancillas) {
        if (ov.ancilla && *ov.ancilla != anc.id) continue;
        for (auto& cp : anc.couplings) cp.lambda *= ov.scale;
      }
      for (auto& g : c.gates) {
        if (ov.ancilla && g.ancilla != ov.ancilla) continue;
        g.lambda *= ov.scale;
      }
    }
    if (seg.hamiltonian) {
      c.system_gates = system_gates(*seg.hamiltonian, c.system_layout(), c.params);
    }
    out.circuits.push_back(std::move(c));
  }
  out.segments = std::move(schedule);
  return out;
}

}  // namespace mcm

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mcm/gkls_model.hpp"

namespace mcm {

/// Timestep and coupling constants of one collision step.
struct StepParams {
  double dt = 0.0;
  double g_I = 0.0;     // interaction energy scale
  double g_S = 0.0;     // system energy scale
  double gamma = 0.0;   // g_I^2 dt

  /// g_I = sqrt(gamma / dt), g_S = gs_ratio * g_I.
  static StepParams from_gamma(double gamma, double dt, double gs_ratio = 0.05);
  /// Fixed coupling constants; gamma follows as g_I^2 dt.
  static StepParams from_couplings(double g_I, double g_S, double dt);

  /// Human-readable notes for violated asymptotic conditions.
  std::vector<std::string> warnings(const Tolerances& tol = default_tolerances()) const;

  bool operator==(const StepParams&) const = default;
};

/// Ancilla coupling to one target operator with amplitude lambda.
struct AncillaCoupling {
  std::size_t target = 0;
  Complex lambda;
  bool operator==(const AncillaCoupling&) const = default;
};

/// One environment qubit, prepared as eta = c|down><down| + (1-c)|up><up|.
struct AncillaSpec {
  std::size_t id = 0;
  double c = 1.0;
  std::string label;
  std::vector<AncillaCoupling> couplings;
};

enum class Coupling { kInteraction, kSystem };

/// exp(-i g fraction dt G) with G = lambda F sigma_a^+ + h.c. (interaction)
/// or G = F (system gate, F Hermitian and dimensionless).
struct ElementaryGate {
  LocalOperator op;
  Complex lambda{1.0, 0.0};
  std::optional<std::size_t> ancilla;
  double fraction = 1.0;
  Coupling coupling = Coupling::kInteraction;
};

/// Executable single-timestep collision model. Layout factors are the system
/// subsystems followed by one qubit per ancilla, in ancilla order.
struct CollisionCircuit {
  TensorLayout layout;
  std::size_t system_factors = 0;
  std::vector<LocalOperator> targets;  // operators the induced dissipator is written in
  std::vector<AncillaSpec> ancillas;
  std::vector<ElementaryGate> gates;   // execution order
  std::vector<ElementaryGate> system_gates;  // run after the interaction gates
  StepParams params;

  TensorLayout system_layout() const;
  std::size_t system_dim() const;
  std::size_t ancilla_site(std::size_t ancilla) const { return system_factors + ancilla; }
  std::size_t interaction_gate_count() const { return gates.size(); }
  std::size_t total_gate_count() const { return gates.size() + system_gates.size(); }

  /// Hermitian generator of `gate` on the local space (op sites, then ancilla).
  Matrix local_generator(const ElementaryGate& gate) const;
  /// Sites of `gate` inside the joint layout.
  std::vector<std::size_t> joint_sites(const ElementaryGate& gate) const;

  /// Throws DimensionError / std::invalid_argument on structural violations.
  void check() const;
};

/// Emission and absorption Kossakowski matrices over circuit.targets:
/// the induced dissipator is
///   sum_xy down_xy D_{T_x,T_y} + sum_xy up_xy D_{T_x^dag,T_y^dag}.
struct InducedCoefficients {
  Matrix emission;
  Matrix absorption;
};

InducedCoefficients induced_coefficients(const CollisionCircuit& circuit);

/// Per-ancilla 2x2 (or R x R) contribution c lambda lambda^dag, in the
/// ancilla's coupling order.
Matrix pair_contribution(const AncillaSpec& ancilla);

/// Largest mismatch between each ancilla's declared couplings and what its
/// gates implement to first order (sum over gates of fraction * lambda * F).
double coupling_realization_residual(const CollisionCircuit& circuit);

/// Master equation generated by the circuit to first order in dt.
GKLSModel induced_model(const CollisionCircuit& circuit);

}  // namespace mcm

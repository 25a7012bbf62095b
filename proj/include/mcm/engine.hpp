#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mcm/compiler.hpp"
#include "mcm/superoperator.hpp"

namespace mcm {

struct EngineOptions {
  std::size_t dimension_cap = kDefaultDimensionCap;
  /// Reject (rather than tolerate) step inputs whose trace is off by more
  /// than tol.density_trace.
  bool strict_density_check = false;
  /// Build the step as one exponential of the summed generator instead of
  /// the gate product (the unsplit collision of a single timestep).
  bool unsplit = false;
  Tolerances tol;
};

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// U_sim(dt) = U_S(dt) U_I(dt) on system plus every ancilla of the step.
struct StepUnitary {
  Matrix matrix;
};

StepUnitary build_step_unitary(const CollisionCircuit& circuit,
                               const EngineOptions& options = {});

/// exp(-i g fraction dt G) for one gate on its local space.
Matrix gate_unitary(const CollisionCircuit& circuit, const ElementaryGate& gate);

/// Initial environment state: tensor product of eta_p over ancillas.
Matrix environment_state(const CollisionCircuit& circuit);

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;
  std::vector<std::string> warnings;
};

/// Runs a compiled circuit. Immutable after construction: the joint unitary
/// is built once and every call starts from freshly prepared ancillas.
class CollisionEngine {
 public:
  explicit CollisionEngine(CollisionCircuit circuit, EngineOptions options = {});

  const CollisionCircuit& circuit() const { return circuit_; }
  const StepUnitary& unitary() const { return unitary_; }

  /// Tr_E[U (rho (x) rho_E) U^dag]. In strict mode inputs whose trace is off
  /// by more than tol.density_trace throw std::invalid_argument.
  Matrix step(const Matrix& rho) const;
  /// Same map without any density-operator checks (used on operator bases).
  Matrix step_linear(const Matrix& x) const;

  /// Non-density initial states are reported in Trajectory::warnings.
  Trajectory evolve(const Matrix& rho0, std::size_t n_steps) const;

  /// phi_dt as a D^2 x D^2 matrix, built column by column from matrix units.
  Superoperator extract_map() const;

  /// Empty when rho looks like a density operator, else a description.
  std::string density_issue(const Matrix& rho) const;

 private:
  CollisionCircuit circuit_;
  EngineOptions options_;
  StepUnitary unitary_;
  Matrix environment_;
  std::vector<std::size_t> system_sites_;
};

/// Evolution under a piecewise-constant schedule.
Trajectory evolve_piecewise(const PiecewiseCircuit& pc, const Matrix& rho0,
                            std::size_t n_steps, const EngineOptions& options = {});

/// || prod_g exp(-i g f dt G_g) - exp(-i g dt sum_g f_g G_g) ||_inf over the
/// gates of one ancilla: the symmetrization defect of its sequence.
double symmetrization_defect(const CollisionCircuit& circuit, std::size_t ancilla);

/// CSV: comment header, then `step,t,re_0_0,im_0_0,re_0_1,...` with rho_S
/// entries in row-major order.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const std::vector<std::string>& header_comments = {});

}  // namespace mcm

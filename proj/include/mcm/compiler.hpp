#pragma once

#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mcm/circuit.hpp"

namespace mcm {

/// The non-diagonal assignment cannot reproduce the requested Kossakowski
/// matrix; compile the diagonal form instead.
class InfeasibleEngineering : public std::runtime_error {
 public:
  InfeasibleEngineering(const std::string& what, std::size_t op_index, double residual)
      : std::runtime_error(what), op_index_(op_index), residual_(residual) {}
  std::size_t op_index() const { return op_index_; }
  double residual() const { return residual_; }

 private:
  std::size_t op_index_;
  double residual_;
};

class MissingDecomposition : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gates for the free evolution exp(-i H dt): one per k-local term when
/// `klocal` is given and every Pauli component of H fits inside some term
/// (qubit systems only), otherwise a single gate on the whole system.
std::vector<ElementaryGate> system_gates(const Matrix& hamiltonian, const TensorLayout& system,
                                         const StepParams& params,
                                         const std::optional<KLocality>& klocal = std::nullopt);

/// lambda * target = sum_r mu_r G_r; gate r then runs mu_r G_r sigma^+ + h.c.
struct ManyBodyDecomposition {
  LocalOperator target;
  Complex lambda;
  std::vector<LocalOperator> basis;
  std::vector<Complex> mu;
  double residual = 0.0;

  std::size_t R() const { return basis.size(); }
  /// sum_r mu_r G_r as a full-system matrix.
  Matrix reassembled(const TensorLayout& layout) const;
};

/// Least-squares coefficients of lambda * target over `basis`. Throws
/// std::invalid_argument when the residual exceeds tol.span_residual.
ManyBodyDecomposition decompose_manybody(const LocalOperator& target, Complex lambda,
                                         std::vector<LocalOperator> basis,
                                         const TensorLayout& layout,
                                         const Tolerances& tol = default_tolerances());

/// One ancilla per GKS pair carrying off-diagonal weight plus one per
/// operator with leftover diagonal weight; all ancillas start in the ground
/// state. Throws InfeasibleEngineering when some gamma_jj is smaller than the
/// summed off-diagonal magnitudes of its row.
CollisionCircuit compile_nondiagonal(const GKLSModel& model, const StepParams& params,
                                     const Tolerances& tol = default_tolerances());

/// One ground-state ancilla per Lindblad operator with lambda_k =
/// sqrt(Gamma_k / gamma) and a palindromic 2R-1 gate sequence over its
/// components. `decompositions` (keyed by Lindblad index) override the
/// stored components.
CollisionCircuit compile_diagonal(const DiagonalModel& dm, const StepParams& params,
                                  const std::map<std::size_t, ManyBodyDecomposition>&
                                      decompositions = {});

/// Bath temperature. Zero and infinite temperature are explicit limits;
/// negative values encode population-inverted baths.
struct Temperature {
  enum class Kind { kFinite, kZero, kInfinite };
  Kind kind = Kind::kZero;
  double value = 0.0;

  static Temperature finite(double T);
  static Temperature zero() { return {Kind::kZero, 0.0}; }
  static Temperature infinite() { return {Kind::kInfinite, 0.0}; }
};

/// Common bosonic bath acting on qubit `sites` through sigma^-.
struct ThermalBath {
  double omega = 1.0;
  Temperature temperature;
  std::vector<std::size_t> sites;
  double gamma0 = 1.0;
};

/// Mean occupation N_T(omega) = 1/(exp(omega/T) - 1).
double thermal_occupation(double omega, const Temperature& T);

struct ThermalEngineering {
  double occupation;  // N_T; +inf for the infinite-temperature limit
  double c;           // ancilla ground-state population
  double lambda;      // gate amplitude for the chosen gamma
  double emission;    // induced gamma^down
  double absorption;  // induced gamma^up
};

ThermalEngineering engineer_thermal(const ThermalBath& bath, double gamma);

/// Single thermal ancilla with the common-bath palindrome over bath.sites.
CollisionCircuit compile_thermal(const ThermalBath& bath, const TensorLayout& system,
                                 const StepParams& params,
                                 const std::optional<Matrix>& hamiltonian = std::nullopt);

/// Master equation the thermal bath is meant to reproduce (GKS operators
/// sigma_m^- then sigma_m^+ over bath.sites).
GKLSModel thermal_target_model(const ThermalBath& bath, const TensorLayout& system,
                               const std::optional<Matrix>& hamiltonian = std::nullopt);

/// Single ground-state ancilla shared by `sites` qubits with lambda^(m) =
/// weights[m]; induced Kossakowski matrix gamma * w w^T.
CollisionCircuit compile_common_bath(std::size_t sites, std::span<const double> weights,
                                     const StepParams& params,
                                     const std::optional<Matrix>& hamiltonian = std::nullopt);

/// Multiplies the lambdas of one ancilla (or all, when unset).
struct LambdaOverride {
  std::optional<std::size_t> ancilla;
  Complex scale{1.0, 0.0};
};

struct ScheduleSegment {
  double t_start = 0.0;
  double t_end = std::numeric_limits<double>::infinity();
  std::vector<LambdaOverride> lambda_overrides;
  std::optional<Matrix> hamiltonian;  // effective H, replaces the system gate
};

/// Piecewise-constant circuit family; step n uses the segment whose interval
/// contains n * dt.
struct PiecewiseCircuit {
  std::vector<ScheduleSegment> segments;
  std::vector<CollisionCircuit> circuits;

  std::size_t segment_for_step(std::size_t n) const;
  const CollisionCircuit& at_step(std::size_t n) const { return circuits[segment_for_step(n)]; }
};

/// Throws std::invalid_argument for unsorted, gapped, or overlapping schedules.
PiecewiseCircuit schedule_time_dependent(const CollisionCircuit& base,
                                         std::vector<ScheduleSegment> schedule);

}  // namespace mcm

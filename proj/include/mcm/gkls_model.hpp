#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mcm/operator_core.hpp"
#include "mcm/tolerances.hpp"

namespace mcm {

/// Operator supported on a sorted set of subsystems.
struct LocalOperator {
  std::vector<std::size_t> sites;
  Matrix matrix;
  std::string label;

  /// Full-space operator on `layout`.
  Matrix full(const TensorLayout& layout) const;

  /// Same operator re-expressed on a superset of its sites.
  LocalOperator extended_to(std::span<const std::size_t> superset,
                            const TensorLayout& layout) const;

  LocalOperator adjoint() const;

  /// Throws DimensionError if sites are unsorted, repeated, out of range, or
  /// the matrix does not match their dimension.
  void check(const TensorLayout& layout) const;
};

std::vector<std::size_t> union_of_sites(std::span<const LocalOperator> ops);

/// One term L_sigma of a k-local Liouvillian: the subsystems it touches and
/// the GKS operators (by index) it owns.
struct KLocalTerm {
  std::vector<std::size_t> sites;
  std::vector<std::size_t> ops;
  bool operator==(const KLocalTerm&) const = default;
};

struct KLocality {
  std::size_t k = 1;
  std::vector<KLocalTerm> terms;
};

/// Non-diagonal GKLS generator
///   L[rho] = -i[H, rho] + sum_jk gamma_jk (F_j rho F_k^dag - 1/2 {F_k^dag F_j, rho}).
struct GKLSModel {
  TensorLayout layout;  // system only
  Matrix hamiltonian;   // effective system Hamiltonian, energy units
  std::vector<LocalOperator> gks_ops;
  Matrix kossakowski;   // J x J, energy units
  /// Optional additive split of each GKS operator into simpler pieces (used
  /// to derive per-support gate components). Empty, or one list per op.
  std::vector<std::vector<LocalOperator>> gks_terms;
  std::optional<KLocality> klocal;

  std::size_t system_dim() const { return layout.total_dim(); }
  std::size_t num_ops() const { return gks_ops.size(); }

  /// Terms of GKS operator j (the operator itself when no split is stored).
  std::vector<LocalOperator> terms_of(std::size_t j) const;
};

struct InvariantCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<InvariantCheck> checks;
  bool accepted() const;
  double kossakowski_min_eigenvalue = 0.0;
  const InvariantCheck* first_failure() const;
};

/// Thrown when an operation requires a valid model.
class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& what, ValidationReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

ValidationReport validate(const GKLSModel& model,
                          const Tolerances& tol = default_tolerances());

/// Diagonal form: L_k = sum_j C_jk F_j with rates Gamma_k (descending).
struct DiagonalModel {
  TensorLayout layout;
  Matrix hamiltonian;
  std::vector<LocalOperator> lindblad_ops;
  /// Per Lindblad operator, its additive pieces grouped by support.
  std::vector<std::vector<LocalOperator>> components;
  std::vector<double> rates;
  Matrix unitary_C;                // J x J, columns are eigenvectors
  std::vector<double> spectrum;    // all J eigenvalues, descending
  std::optional<KLocality> klocal;  // carried over for splitting H_S

  /// The same dynamics written as a GKLSModel with gamma = diag(rates).
  GKLSModel as_gkls() const;
};

DiagonalModel diagonalize(const GKLSModel& model,
                          const Tolerances& tol = default_tolerances());

/// Right-hand side of the master equation, evaluated directly on rho.
Matrix apply_liouvillian(const GKLSModel& model, const Matrix& rho);

/// Number of k-element subsets of M subsystems.
std::uint64_t klocal_count(std::uint64_t M, std::uint64_t k);
/// Large-M behaviour M^k / (k! e^k).
double klocal_asymptote(std::uint64_t M, std::uint64_t k);

}  // namespace mcm

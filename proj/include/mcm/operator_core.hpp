#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mcm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Thrown for shape, site and layout mismatches.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Ordered local dimensions of a tensor-product space. Factor 0 is the most
/// significant index: |i_0 i_1 ... i_{n-1}> has flat index
/// i_0 * (d_1 ... d_{n-1}) + ... + i_{n-1}.
class TensorLayout {
 public:
  TensorLayout() = default;
  explicit TensorLayout(std::vector<std::size_t> factor_dims);

  /// M identical factors of dimension d.
  static TensorLayout uniform(std::size_t factors, std::size_t d);

  std::size_t size() const { return dims_.size(); }
  std::size_t dim(std::size_t site) const { return dims_.at(site); }
  std::size_t total_dim() const { return total_; }
  const std::vector<std::size_t>& dims() const { return dims_; }

  /// Product of the dimensions at `sites`.
  std::size_t dim_of(std::span<const std::size_t> sites) const;

  /// Layout extended by extra trailing factors.
  TensorLayout appended(std::span<const std::size_t> extra) const;

  /// Throws DimensionError on duplicate or out-of-range sites.
  void check_sites(std::span<const std::size_t> sites) const;

  bool operator==(const TensorLayout&) const = default;

 private:
  std::vector<std::size_t> dims_;
  std::size_t total_ = 1;
};

// Fixed two-level matrices. Basis index 0 is the excited state |up>, index 1
// the ground state |down>, so sigma_z = diag(1, -1) and sigma_plus = |0><1|.
Matrix identity(std::size_t n);
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix sigma_plus();
Matrix sigma_minus();

Matrix kron(const Matrix& a, const Matrix& b);
Matrix kron_all(std::span<const Matrix> factors);

/// Operator acting as `op` on `sites` (in the given order) and as the identity
/// elsewhere.
Matrix embed(const Matrix& op, std::span<const std::size_t> sites,
             const TensorLayout& layout);

/// embed(op, sites, layout) * target, computed without forming the embedding.
Matrix apply_local_left(const Matrix& op, std::span<const std::size_t> sites,
                        const TensorLayout& layout, const Matrix& target);

/// Reduced operator on `keep` (output factor order follows `keep`).
Matrix partial_trace(const Matrix& state, const TensorLayout& layout,
                     std::span<const std::size_t> keep);

/// exp(A) by scaling and squaring around a truncated Taylor series.
Matrix matrix_exp(const Matrix& a);

double trace_norm(const Matrix& a);
double op_norm(const Matrix& a);
double max_abs(const Matrix& a);

bool is_hermitian(const Matrix& a, double tol);
bool is_unitary(const Matrix& u, double tol);

/// Smallest eigenvalue of the Hermitian part of a square matrix.
double min_hermitian_eigenvalue(const Matrix& a);

/// Block-diagonal direct sum.
Matrix direct_sum(const Matrix& a, const Matrix& b);

}  // namespace mcm

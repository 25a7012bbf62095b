#include "mcm/superoperator.hpp"

namespace mcm {

Vector vec(const Matrix& m) { return m.reshaped(); }

Matrix unvec(const Vector& v, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (v.size() != d * d) throw DimensionError("unvec: length is not dim^2");
  return v.reshaped(d, d);
}

Superoperator Superoperator::identity(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim * dim);
  return {Matrix::Identity(n, n), dim};
}

Superoperator Superoperator::sandwich(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw DimensionError("sandwich: operators must be square and equal-sized");
  }
  return {kron(b.transpose(), a), static_cast<std::size_t>(a.rows())};
}

Matrix Superoperator::apply(const Matrix& rho) const {
  if (rho.rows() != static_cast<Eigen::Index>(dim) || rho.cols() != rho.rows()) {
    throw DimensionError("Superoperator::apply: operator has wrong dimension");
  }
  return unvec(matrix * vec(rho), dim);
}

Superoperator Superoperator::then(const Superoperator& next) const {
  if (next.dim != dim) throw DimensionError("Superoperator::then: dimension mismatch");
  return {next.matrix * matrix, dim};
}

Superoperator Superoperator::power(std::uint64_t n) const {
  Superoperator result = identity(dim);
  Matrix base = matrix;
  while (n > 0) {
    if (n & 1u) result.matrix = base * result.matrix;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

Matrix Superoperator::choi() const {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix c = Matrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      // vec(|a><b|) has its single 1 at index a + b d.
      const Matrix out = unvec(matrix.col(a + b * d), dim);
      c.block(a * d, b * d, d, d) = out;
    }
  }
  return c;
}

double Superoperator::trace_preservation_residual() const {
  const Vector id = vec(Matrix::Identity(static_cast<Eigen::Index>(dim),
                                         static_cast<Eigen::Index>(dim)));
  return (id.adjoint() * matrix - id.adjoint()).cwiseAbs().maxCoeff();
}

double Superoperator::trace_annihilation_residual() const {
  const Vector id = vec(Matrix::Identity(static_cast<Eigen::Index>(dim),
                                         static_cast<Eigen::Index>(dim)));
  return (id.adjoint() * matrix).cwiseAbs().maxCoeff();
}

}  // namespace mcm

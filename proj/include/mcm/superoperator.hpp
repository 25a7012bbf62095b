#pragma once

#include <cstdint>

#include "mcm/operator_core.hpp"

namespace mcm {

// Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, std::size_t dim);

/// Linear map on D x D operators stored as a D^2 x D^2 matrix acting on vec().
struct Superoperator {
  Matrix matrix;
  std::size_t dim = 0;

  static Superoperator identity(std::size_t dim);
  /// Left and right multiplication: rho -> A rho B.
  static Superoperator sandwich(const Matrix& a, const Matrix& b);

  Matrix apply(const Matrix& rho) const;
  Superoperator then(const Superoperator& next) const;  // next o this
  Superoperator power(std::uint64_t n) const;

  /// Choi matrix sum_ab |a><b| kron Phi(|a><b|).
  Matrix choi() const;
  /// max-abs of vec(I)^dag M - vec(I)^dag; zero for trace-preserving maps.
  double trace_preservation_residual() const;
  /// max-abs of vec(I)^dag M; zero for generators of trace-preserving maps.
  double trace_annihilation_residual() const;
};

}  // namespace mcm

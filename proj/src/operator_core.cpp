#include "mcm/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace mcm {

TensorLayout::TensorLayout(std::vector<std::size_t> factor_dims)
    : dims_(std::move(factor_dims)) {
  for (std::size_t d : dims_) {
    if (d == 0) throw DimensionError("TensorLayout: zero local dimension");
    total_ *= d;
  }
}

TensorLayout TensorLayout::uniform(std::size_t factors, std::size_t d) {
  return TensorLayout(std::vector<std::size_t>(factors, d));
}

std::size_t TensorLayout::dim_of(std::span<const std::size_t> sites) const {
  std::size_t n = 1;
  for (std::size_t s : sites) n *= dim(s);
  return n;
}

TensorLayout TensorLayout::appended(std::span<const std::size_t> extra) const {
  std::vector<std::size_t> dims = dims_;
  dims.insert(dims.end(), extra.begin(), extra.end());
  return TensorLayout(std::move(dims));
}

void TensorLayout::check_sites(std::span<const std::size_t> sites) const {
  std::vector<bool> seen(size(), false);
  for (std::size_t s : sites) {
    if (s >= size()) {
      throw DimensionError("site " + std::to_string(s) +
                           " out of range for layout with " +
                           std::to_string(size()) + " factors");
    }
    if (seen[s]) throw DimensionError("duplicate site " + std::to_string(s));
    seen[s] = true;
  }
}

namespace {

std::vector<std::size_t> strides(const TensorLayout& layout) {
  std::vector<std::size_t> st(layout.size(), 1);
  for (std::size_t i = layout.size(); i-- > 1;) {
    st[i - 1] = st[i] * layout.dim(i);
  }
  return st;
}

// Flat offsets of every local multi-index over `sites`, with sites[0] the most
// significant local digit.
std::vector<Eigen::Index> local_offsets(const TensorLayout& layout,
                                        std::span<const std::size_t> sites) {
  const auto st = strides(layout);
  std::vector<Eigen::Index> offs{0};
  for (std::size_t s : sites) {
    std::vector<Eigen::Index> next;
    next.reserve(offs.size() * layout.dim(s));
    for (Eigen::Index o : offs) {
      for (std::size_t k = 0; k < layout.dim(s); ++k) {
        next.push_back(o + static_cast<Eigen::Index>(k * st[s]));
      }
    }
    offs = std::move(next);
  }
  return offs;
}

std::vector<std::size_t> complement(const TensorLayout& layout,
                                    std::span<const std::size_t> sites) {
  std::vector<bool> used(layout.size(), false);
  for (std::size_t s : sites) used[s] = true;
  std::vector<std::size_t> rest;
  for (std::size_t s = 0; s < layout.size(); ++s) {
    if (!used[s]) rest.push_back(s);
  }
  return rest;
}

void check_local(const Matrix& op, std::span<const std::size_t> sites,
                 const TensorLayout& layout) {
  layout.check_sites(sites);
  const auto n = static_cast<Eigen::Index>(layout.dim_of(sites));
  if (op.rows() != n || op.cols() != n) {
    throw DimensionError("local operator is " + std::to_string(op.rows()) +
                         "x" + std::to_string(op.cols()) +
                         " but the selected sites span dimension " +
                         std::to_string(n));
  }
}

}  // namespace

Matrix identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return Matrix::Identity(k, k);
}

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix sigma_plus() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Matrix sigma_minus() { return sigma_plus().adjoint(); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix kron_all(std::span<const Matrix> factors) {
  Matrix out = Matrix::Identity(1, 1);
  for (const Matrix& f : factors) out = kron(out, f);
  return out;
}

Matrix embed(const Matrix& op, std::span<const std::size_t> sites,
             const TensorLayout& layout) {
  check_local(op, sites, layout);
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  const auto local = local_offsets(layout, sites);
  const auto rest = complement(layout, sites);
  const auto bases = local_offsets(layout, rest);
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index b : bases) {
    for (std::size_t i = 0; i < local.size(); ++i) {
      for (std::size_t j = 0; j < local.size(); ++j) {
        out(b + local[i], b + local[j]) =
            op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
  }
  return out;
}

Matrix apply_local_left(const Matrix& op, std::span<const std::size_t> sites,
                        const TensorLayout& layout, const Matrix& target) {
  check_local(op, sites, layout);
  if (target.rows() != static_cast<Eigen::Index>(layout.total_dim())) {
    throw DimensionError("apply_local_left: target row count mismatch");
  }
  const auto local = local_offsets(layout, sites);
  const auto rest = complement(layout, sites);
  const auto bases = local_offsets(layout, rest);
  Matrix out(target.rows(), target.cols());
  std::vector<Eigen::Index> rows(local.size());
  for (Eigen::Index b : bases) {
    for (std::size_t i = 0; i < local.size(); ++i) rows[i] = b + local[i];
    out(rows, Eigen::all) =
        op * target(rows, Eigen::all);
  }
  return out;
}

Matrix partial_trace(const Matrix& state, const TensorLayout& layout,
                     std::span<const std::size_t> keep) {
  layout.check_sites(keep);
  const auto n = static_cast<Eigen::Index>(layout.total_dim());
  if (state.rows() != n || state.cols() != n) {
    throw DimensionError("partial_trace: state is " +
                         std::to_string(state.rows()) + "x" +
                         std::to_string(state.cols()) + ", layout needs " +
                         std::to_string(n));
  }
  const auto kept = local_offsets(layout, keep);
  const auto traced = local_offsets(layout, complement(layout, keep));
  const auto k = static_cast<Eigen::Index>(kept.size());
  Matrix out = Matrix::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      Complex acc = 0.0;
      for (Eigen::Index t : traced) acc += state(kept[i] + t, kept[j] + t);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix matrix_exp(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("matrix_exp: matrix is not square");
  }
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  // Induced 1-norm bounds the spectral radius and the Taylor remainder.
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm >= 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5))) + 1;
  }
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 40; ++k) {
    term = (term * scaled) / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) {
      break;
    }
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

double trace_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double max_abs(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

bool is_hermitian(const Matrix& a, double tol) {
  return a.rows() == a.cols() && max_abs(a - a.adjoint()) <= tol;
}

bool is_unitary(const Matrix& u, double tol) {
  return u.rows() == u.cols() &&
         max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())) <= tol;
}

double min_hermitian_eigenvalue(const Matrix& a) {
  if (a.rows() != a.cols()) {
    throw DimensionError("min_hermitian_eigenvalue: matrix is not square");
  }
  if (a.size() == 0) return 0.0;
  const Matrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

}  // namespace mcm

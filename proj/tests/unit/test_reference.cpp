#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mcm/compiler.hpp"
#include "mcm/reference.hpp"
#include "test_util.hpp"

namespace mcm {
namespace {

using test::MatrixNear;

GKLSModel random_model(std::mt19937_64& rng) {
  GKLSModel m = test::two_qubit_decay(test::random_dominant_psd(2, rng),
                                      0.5 * test::random_hermitian(4, rng));
  m.gks_ops.push_back({{0, 1}, test::random_matrix(4, rng), "G"});
  const Matrix a = test::random_matrix(3, rng);
  m.kossakowski = 0.3 * a * a.adjoint();
  return m;
}

TEST(Liouvillian, MatchesDirectApplication) {
  std::mt19937_64 rng(51);
  const GKLSModel m = random_model(rng);
  const Superoperator l = vectorize_liouvillian(m);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = test::random_matrix(4, rng);
    EXPECT_TRUE(MatrixNear(l.apply(x), apply_liouvillian(m, x), 1e-11));
  }
  EXPECT_LE(l.trace_annihilation_residual(), 1e-11);
}

TEST(Liouvillian, HalfZHamiltonianByHand) {
  GKLSModel m = test::single_qubit(sigma_minus(), 0.0, 0.5 * pauli_z());
  const Superoperator l = vectorize_liouvillian(m);
  // vec order (00, 10, 01, 11); rho_10 rotates as +i, rho_01 as -i.
  Matrix expected = Matrix::Zero(4, 4);
  expected(1, 1) = Complex(0, 1);
  expected(2, 2) = Complex(0, -1);
  EXPECT_TRUE(MatrixNear(l.matrix, expected, 1e-15));
  Eigen::ComplexEigenSolver<Matrix> es(l.matrix);
  std::vector<double> im;
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(es.eigenvalues()(i).real(), 0.0, 1e-15);
    im.push_back(es.eigenvalues()(i).imag());
  }
  std::sort(im.begin(), im.end());
  EXPECT_NEAR(im[0], -1.0, 1e-14);
  EXPECT_NEAR(im[1], 0.0, 1e-14);
  EXPECT_NEAR(im[2], 0.0, 1e-14);
  EXPECT_NEAR(im[3], 1.0, 1e-14);
}

TEST(Liouvillian, SpectrumInLeftHalfPlane) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::ComplexEigenSolver<Matrix> es(vectorize_liouvillian(random_model(rng)).matrix);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      EXPECT_LE(es.eigenvalues()(i).real(), 1e-9);
    }
  }
}

TEST(Semigroup, AmplitudeDampingDecay) {
  const GKLSModel m = test::single_qubit(sigma_minus(), 1.0);
  Matrix e = Matrix::Zero(2, 2);
  e(0, 0) = 1.0;
  const Matrix out = semigroup(m, 1.0).apply(e);
  EXPECT_NEAR(out(0, 0).real(), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(out(1, 1).real(), 1.0 - std::exp(-1.0), 1e-12);
  EXPECT_THROW(semigroup(m, -0.1), std::invalid_argument);
  EXPECT_TRUE(MatrixNear(semigroup(m, 0.0).matrix, identity(4), 1e-15));
}

TEST(Semigroup, GroupLaw) {
  std::mt19937_64 rng(53);
  const GKLSModel m = random_model(rng);
  const Superoperator l = vectorize_liouvillian(m);
  const Matrix lhs = semigroup(l, 0.7).then(semigroup(l, 0.45)).matrix;
  EXPECT_TRUE(MatrixNear(lhs, semigroup(l, 1.15).matrix, 1e-11));
}

TEST(Semigroup, AgreesWithRungeKutta) {
  std::mt19937_64 rng(54);
  const GKLSModel m = random_model(rng);
  const Matrix rho = test::random_density(4, rng);
  const Matrix exact = semigroup(m, 1.3).apply(rho);
  EXPECT_LE(trace_norm(exact - test::rk4_evolve(m, rho, 1.3, 4000)), 1e-9);
}

TEST(Semigroup, CapEnforced) {
  EXPECT_THROW(vectorize_liouvillian(test::single_qubit(sigma_minus(), 1.0), 3), CapExceeded);
  EXPECT_NO_THROW(vectorize_liouvillian(test::single_qubit(sigma_minus(), 1.0), 4));
}

TEST(RandomState, PureAndNormalized) {
  std::mt19937_64 rng(55);
  const Matrix p = random_pure_state(5, rng);
  EXPECT_NEAR(p.trace().real(), 1.0, 1e-14);
  EXPECT_TRUE(MatrixNear(p * p, p, 1e-14));
}

TEST(MeasureErrors, DeterministicForSeed) {
  const GKLSModel m = test::single_qubit(sigma_minus(), 1.0);
  const auto c = compile_nondiagonal(m, StepParams::from_gamma(1.0, 0.05));
  const auto a = measure_errors(c, m, 20, 8, 7);
  const auto b = measure_errors(c, m, 20, 8, 7);
  EXPECT_EQ(a.eps_g_lower, b.eps_g_lower);
  ASSERT_EQ(a.per_state.size(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(a.per_state[i].trace_distance, b.per_state[i].trace_distance);
  EXPECT_NE(measure_errors(c, m, 20, 8, 8).eps_g_lower, a.eps_g_lower);
  EXPECT_THROW(measure_errors(c, m, 0, 8, 7), std::invalid_argument);
  EXPECT_THROW(measure_errors(c, m, 1, 0, 7), std::invalid_argument);
}

TEST(MeasureErrors, HamiltonianOnlyIsExact) {
  std::mt19937_64 rng(56);
  GKLSModel m;
  m.layout = TensorLayout::uniform(2, 2);
  m.hamiltonian = test::random_hermitian(4, rng);
  m.kossakowski = Matrix::Zero(0, 0);
  const auto c = compile_nondiagonal(m, StepParams::from_gamma(1.0, 0.1));
  EXPECT_TRUE(c.gates.empty());
  const auto r = measure_errors(c, m, 10, 16, 3);
  EXPECT_LE(r.eps_g_lower, 1e-10);
  EXPECT_LE(r.eps_s_lower, 1e-10);
}

TEST(MeasureErrors, GlobalErrorHalvesWithStepCount) {
  const GKLSModel m = test::single_qubit(sigma_minus(), 1.0, 0.4 * pauli_x());
  auto eps = [&](std::size_t n) {
    const auto c = compile_nondiagonal(m, StepParams::from_gamma(1.0, 1.0 / double(n)));
    return measure_errors(c, m, n, 32, 11).eps_g_lower;
  };
  const double ratio = eps(100) / eps(200);
  EXPECT_NEAR(ratio, 2.0, 0.15);
}

TEST(MeasureErrors, ErrorDecomposition) {
  std::mt19937_64 rng(57);
  const GKLSModel m = test::two_qubit_decay(test::random_dominant_psd(2, rng));
  const auto c = compile_nondiagonal(m, StepParams::from_gamma(1.0, 0.02));
  const auto r = measure_errors(c, m, 10, 16, 5);
  EXPECT_LE(r.eps_s_lower, r.eps_t_lower + r.eps_c_lower + 1e-15);
  EXPECT_GT(r.eps_c_lower, 0.0);
  EXPECT_LE(r.eps_c_lower, r.eps_t_lower);
}

TEST(MeasureErrors, CsvFormat) {
  const GKLSModel m = test::single_qubit(sigma_minus(), 1.0);
  const auto c = compile_nondiagonal(m, StepParams::from_gamma(1.0, 0.1));
  std::ostringstream os;
  write_error_csv(os, measure_errors(c, m, 5, 3, 99));
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("# mcm-errors v1\n# seed=99 samples=3", 0), 0u);
  EXPECT_NE(s.find("\nsample_index,trace_distance\n0,"), std::string::npos);
}

}  // namespace
}  // namespace mcm

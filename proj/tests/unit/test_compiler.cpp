#include <gtest/gtest.h>

#include <cmath>

#include "mcm/compiler.hpp"
#include "test_util.hpp"

namespace mcm {
namespace {

using test::MatrixNear;

const StepParams kParams = StepParams::from_gamma(1.0, 0.01);

// Emission coefficients sum_p gamma c_p lambda_x conj(lambda_y), evaluated from
// the ancilla table alone.
Matrix emission_from_table(const CollisionCircuit& c) {
  const auto J = static_cast<Eigen::Index>(c.targets.size());
  Matrix g = Matrix::Zero(J, J);
  for (const auto& a : c.ancillas) {
    for (const auto& x : a.couplings) {
      for (const auto& y : a.couplings) {
        g(static_cast<Eigen::Index>(x.target), static_cast<Eigen::Index>(y.target)) +=
            c.params.gamma * a.c * x.lambda * std::conj(y.lambda);
      }
    }
  }
  return g;
}

std::vector<double> fractions(const CollisionCircuit& c) {
  std::vector<double> f;
  for (const auto& g : c.gates) f.push_back(g.fraction);
  return f;
}

TEST(StepParams, DerivedConstants) {
  const auto p = StepParams::from_gamma(2.0, 0.02, 0.05);
  EXPECT_NEAR(p.g_I, 10.0, 1e-12);
  EXPECT_NEAR(p.g_S, 0.5, 1e-12);
  EXPECT_NEAR(p.g_I * p.g_I * p.dt, p.gamma, 1e-12);
  EXPECT_TRUE(p.warnings().empty());
  EXPECT_FALSE(StepParams::from_gamma(1.0, 0.1, 0.5).warnings().empty());
  EXPECT_THROW(StepParams::from_gamma(1.0, 0.0), std::invalid_argument);
  const auto q = StepParams::from_couplings(3.0, 0.1, 0.01);
  EXPECT_NEAR(q.gamma, 0.09, 1e-15);
}

TEST(NonDiagonal, SingleOperator) {
  const double rate = 0.5;
  const auto c = compile_nondiagonal(test::single_qubit(sigma_minus(), rate), kParams);
  ASSERT_EQ(c.ancillas.size(), 1u);
  EXPECT_EQ(c.ancillas[0].c, 1.0);
  ASSERT_EQ(c.gates.size(), 1u);
  EXPECT_EQ(c.gates[0].fraction, 1.0);
  EXPECT_NEAR(std::abs(c.gates[0].lambda), std::sqrt(rate / kParams.gamma), 1e-14);
}

TEST(NonDiagonal, RankOnePairHasNoResidualAncillas) {
  const double rate = 0.8;
  const auto c = compile_nondiagonal(test::two_qubit_decay(rate * Matrix::Ones(2, 2)), kParams);
  ASSERT_EQ(c.ancillas.size(), 1u);
  ASSERT_EQ(c.ancillas[0].couplings.size(), 2u);
  for (const auto& cp : c.ancillas[0].couplings) {
    EXPECT_NEAR(std::abs(cp.lambda), std::sqrt(rate / kParams.gamma), 1e-14);
  }
  EXPECT_EQ(fractions(c), (std::vector<double>{0.5, 1.0, 0.5}));
  EXPECT_EQ(c.gates[0].op.sites, c.gates[2].op.sites);
  EXPECT_TRUE(MatrixNear(emission_from_table(c), rate * Matrix::Ones(2, 2), 1e-12));
}

TEST(NonDiagonal, DiagonalTargetUsesSelfAncillasOnly) {
  const auto c = compile_nondiagonal(test::two_qubit_decay(identity(2)), kParams);
  ASSERT_EQ(c.ancillas.size(), 2u);
  for (const auto& a : c.ancillas) EXPECT_EQ(a.couplings.size(), 1u);
  EXPECT_EQ(c.gates.size(), 2u);
}

TEST(NonDiagonal, PairPlusResiduals) {
  Matrix g(2, 2);
  g << 2, 1, 1, 2;
  const auto c = compile_nondiagonal(test::two_qubit_decay(g), kParams);
  std::size_t pairs = 0;
  std::size_t singles = 0;
  for (const auto& a : c.ancillas) {
    if (a.couplings.size() == 2) ++pairs;
    if (a.couplings.size() == 1) {
      ++singles;
      EXPECT_NEAR(std::norm(a.couplings[0].lambda) * kParams.gamma, 1.0, 1e-12);
    }
  }
  EXPECT_EQ(pairs, 1u);
  EXPECT_EQ(singles, 2u);
  EXPECT_TRUE(MatrixNear(emission_from_table(c), g, 1e-12));
  EXPECT_TRUE(MatrixNear(induced_coefficients(c).emission, g, 1e-12));
}

TEST(NonDiagonal, ComplexOffDiagonalPhase) {
  Matrix g(2, 2);
  g << 1.5, Complex(0.3, -0.4), Complex(0.3, 0.4), 1.0;
  const auto c = compile_nondiagonal(test::two_qubit_decay(g), kParams);
  EXPECT_TRUE(MatrixNear(emission_from_table(c), g, 1e-12));
  EXPECT_TRUE(MatrixNear(induced_coefficients(c).emission, g, 1e-12));
}

TEST(NonDiagonal, InfeasibleWithoutDominance) {
  Matrix g(2, 2);
  g << 1.0, 1.5, 1.5, 4.0;  // PSD, first row not dominant
  try {
    compile_nondiagonal(test::two_qubit_decay(g), kParams);
    FAIL() << "expected InfeasibleEngineering";
  } catch (const InfeasibleEngineering& e) {
    EXPECT_EQ(e.op_index(), 0u);
    EXPECT_NEAR(e.residual(), -0.5, 1e-12);
    EXPECT_NE(std::string(e.what()).find("compile_diagonal"), std::string::npos);
  }
}

TEST(NonDiagonal, RandomRoundTripAndPositivity) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t J = 2 + trial % 3;
    GKLSModel m;
    m.layout = TensorLayout::uniform(2, 2);
    m.hamiltonian = Matrix::Zero(4, 4);
    for (std::size_t j = 0; j < J; ++j) m.gks_ops.push_back({{j % 2}, test::random_matrix(2, rng), ""});
    m.kossakowski = test::random_dominant_psd(J, rng);
    const auto c = compile_nondiagonal(m, kParams);
    const auto coeffs = induced_coefficients(c);
    EXPECT_TRUE(MatrixNear(coeffs.emission, m.kossakowski, 1e-10));
    EXPECT_LE(max_abs(coeffs.absorption), 0.0);
    EXPECT_GE(min_hermitian_eigenvalue(coeffs.emission), -1e-10);
    for (const auto& a : c.ancillas) EXPECT_GE(min_hermitian_eigenvalue(pair_contribution(a)), -1e-12);
    EXPECT_LE(coupling_realization_residual(c), 1e-12);
  }
}

TEST(NonDiagonal, GeneratorsAreHermitian) {
  std::mt19937_64 rng(32);
  const auto c = compile_nondiagonal(test::two_qubit_decay(test::random_dominant_psd(2, rng)),
                                     kParams);
  for (const auto& g : c.gates) EXPECT_TRUE(is_hermitian(c.local_generator(g), 1e-12));
}

TEST(Diagonal, SingleSite) {
  const auto dm = diagonalize(test::single_qubit(sigma_minus(), 2.0));
  const auto c = compile_diagonal(dm, kParams);
  ASSERT_EQ(c.gates.size(), 1u);
  EXPECT_NEAR(std::abs(c.gates[0].lambda), std::sqrt(2.0), 1e-12);
}

GKLSModel collective(std::size_t M) {
  GKLSModel m;
  m.layout = TensorLayout::uniform(M, 2);
  const auto D = static_cast<Eigen::Index>(m.layout.total_dim());
  m.hamiltonian = Matrix::Zero(D, D);
  for (std::size_t s = 0; s < M; ++s) m.gks_ops.push_back({{s}, sigma_minus(), ""});
  m.kossakowski = Matrix::Ones(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
  return m;
}

TEST(Diagonal, CollectiveGateCounts) {
  for (std::size_t M : {2u, 3u}) {
    const auto dm = diagonalize(collective(M));
    ASSERT_EQ(dm.rates.size(), 1u);
    const auto c = compile_diagonal(dm, kParams);
    EXPECT_EQ(c.ancillas.size(), 1u);
    EXPECT_EQ(c.gates.size(), 2 * M - 1);
    EXPECT_EQ(c.gates[M - 1].fraction, 1.0);
    EXPECT_EQ(c.gates.front().op.sites, c.gates.back().op.sites);
    const auto coeffs = induced_coefficients(c);
    ASSERT_EQ(coeffs.emission.rows(), 1);
    EXPECT_NEAR(coeffs.emission(0, 0).real(), static_cast<double>(M), 1e-12);
    EXPECT_LE(coupling_realization_residual(c), 1e-12);
  }
}

TEST(Diagonal, GateCountIsJTimesTwoRMinusOne) {
  // Six pair operators sigma_a^- + sigma_b^- on four qubits, R = 2 each.
  GKLSModel m;
  m.layout = TensorLayout::uniform(4, 2);
  m.hamiltonian = Matrix::Zero(16, 16);
  for (std::size_t a = 0; a < 4; ++a) {
    for (std::size_t b = a + 1; b < 4; ++b) {
      const std::vector<std::size_t> sites{a, b};
      const Matrix op = kron(sigma_minus(), identity(2)) + kron(identity(2), sigma_minus());
      m.gks_ops.push_back({sites, op, ""});
      m.gks_terms.push_back({{{a}, sigma_minus(), ""}, {{b}, sigma_minus(), ""}});
    }
  }
  m.kossakowski = identity(6);
  const auto c = compile_diagonal(diagonalize(m), kParams);
  EXPECT_EQ(c.interaction_gate_count(), 6u * 3u);
  EXPECT_TRUE(c.system_gates.empty());
}

TEST(Diagonal, ManyBodyNeedsDecomposition) {
  DiagonalModel dm;
  dm.layout = TensorLayout::uniform(2, 2);
  dm.hamiltonian = Matrix::Zero(4, 4);
  dm.lindblad_ops = {{{0, 1}, kron(sigma_minus(), sigma_plus()), "hop"}};
  dm.rates = {1.0};
  EXPECT_THROW(compile_diagonal(dm, kParams), MissingDecomposition);

  const auto d = decompose_manybody(dm.lindblad_ops[0], 1.0, {dm.lindblad_ops[0]}, dm.layout);
  std::map<std::size_t, ManyBodyDecomposition> dec{{0, d}};
  const auto c = compile_diagonal(dm, kParams, dec);
  EXPECT_EQ(c.gates.size(), 1u);
}

TEST(Decompose, ExactGenerator) {
  const TensorLayout l = TensorLayout::uniform(2, 2);
  const LocalOperator t{{0, 1}, kron(sigma_minus(), sigma_plus()), ""};
  const Complex lam(0.3, 0.2);
  const auto d = decompose_manybody(t, lam, {t}, l);
  ASSERT_EQ(d.R(), 1u);
  EXPECT_NEAR(std::abs(d.mu[0] - lam), 0.0, 1e-12);
}

TEST(Decompose, LinearSplit) {
  const TensorLayout l = TensorLayout::uniform(2, 2);
  const LocalOperator t{{0, 1}, kron(sigma_minus(), identity(2)) + kron(identity(2), sigma_minus()), ""};
  const auto d = decompose_manybody(t, 1.0, {{{0}, sigma_minus(), ""}, {{1}, sigma_minus(), ""}}, l);
  ASSERT_EQ(d.R(), 2u);
  EXPECT_NEAR(std::abs(d.mu[0] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(d.mu[1] - 1.0), 0.0, 1e-12);
  EXPECT_TRUE(MatrixNear(d.reassembled(l), t.full(l), 1e-12));
}

TEST(Decompose, RandomTargetOverSixElementBasis) {
  std::mt19937_64 rng(33);
  const TensorLayout l = TensorLayout::uniform(2, 2);
  std::vector<LocalOperator> basis;
  Matrix target = Matrix::Zero(4, 4);
  std::normal_distribution<double> g;
  for (int r = 0; r < 6; ++r) {
    const Matrix b = test::random_matrix(4, rng);
    basis.push_back({{0, 1}, b, ""});
    target += Complex(g(rng), g(rng)) * b;
  }
  const LocalOperator t{{0, 1}, target, ""};
  const auto d = decompose_manybody(t, 0.7, basis, l);
  EXPECT_LE(max_abs(d.reassembled(l) - 0.7 * t.full(l)), 1e-10);
}

TEST(Decompose, RejectsNonSpanningBasis) {
  const TensorLayout l = TensorLayout::uniform(2, 2);
  const LocalOperator t{{0, 1}, kron(sigma_minus(), sigma_minus()), ""};
  EXPECT_THROW(decompose_manybody(t, 1.0, {{{0}, sigma_minus(), ""}}, l), std::invalid_argument);
}

TEST(Thermal, ZeroTemperature) {
  const auto e = engineer_thermal({1.0, Temperature::zero(), {0}, 1.0}, 1.0);
  EXPECT_EQ(e.c, 1.0);
  EXPECT_NEAR(e.lambda, 1.0, 1e-15);
  EXPECT_NEAR(e.absorption, 0.0, 1e-15);
}

TEST(Thermal, OneQuantumOccupation) {
  const double omega = 1.0;
  const ThermalBath bath{omega, Temperature::finite(omega / std::log(2.0)), {0}, 1.0};
  EXPECT_NEAR(thermal_occupation(omega, bath.temperature), 1.0, 1e-12);
  const auto e = engineer_thermal(bath, 1.0);
  EXPECT_NEAR(e.c, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(e.lambda, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(e.emission, 2.0, 1e-12);
  EXPECT_NEAR(e.absorption, 1.0, 1e-12);

  const auto c = compile_thermal(bath, TensorLayout::uniform(1, 2), kParams);
  const auto coeffs = induced_coefficients(c);
  EXPECT_NEAR(coeffs.emission(0, 0).real(), 2.0, 1e-12);
  EXPECT_NEAR(coeffs.absorption(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(coeffs.absorption(0, 0).real() / coeffs.emission(0, 0).real(),
              std::exp(-omega / bath.temperature.value), 1e-12);
}

TEST(Thermal, DetailedBalanceAcrossTemperatures) {
  for (double T : {0.3, 1.0, 4.0}) {
    const ThermalBath bath{1.3, Temperature::finite(T), {0, 1}, 0.5};
    const auto c = compile_thermal(bath, TensorLayout::uniform(2, 2), StepParams::from_gamma(2.0, 0.01));
    const auto coeffs = induced_coefficients(c);
    EXPECT_NEAR(coeffs.absorption(0, 1).real() / coeffs.emission(0, 1).real(),
                std::exp(-1.3 / T), 1e-12);
    const GKLSModel target = thermal_target_model(bath, TensorLayout::uniform(2, 2));
    EXPECT_TRUE(MatrixNear(induced_model(c).kossakowski, target.kossakowski, 1e-12));
  }
}

TEST(Thermal, NegativeTemperatureStaysPhysical) {
  const auto e = engineer_thermal({1.0, Temperature::finite(-2.0), {0}, 1.0}, 1.0);
  EXPECT_GE(e.c, 0.0);
  EXPECT_LE(e.c, 1.0);
  EXPECT_GT(e.absorption, e.emission);
}

TEST(Thermal, InfiniteTemperature) {
  const auto e = engineer_thermal({1.0, Temperature::infinite(), {0}, 1.0}, 1.0);
  EXPECT_EQ(e.c, 0.5);
  EXPECT_NEAR(e.emission, e.absorption, 0.0);
}

TEST(Thermal, RejectsNonpositiveFrequency) {
  EXPECT_THROW(engineer_thermal({0.0, Temperature::finite(1.0), {0}, 1.0}, 1.0),
               std::invalid_argument);
}

TEST(CommonBath, UniformWeights) {
  const std::vector<double> w{1.0, 1.0};
  const auto c = compile_common_bath(2, w, kParams);
  EXPECT_EQ(c.ancillas.size(), 1u);
  EXPECT_EQ(c.gates.size(), 3u);
  EXPECT_TRUE(MatrixNear(induced_coefficients(c).emission, Matrix::Ones(2, 2), 1e-12));
}

TEST(CommonBath, SingleSiteReduction) {
  const std::vector<double> w{1.0, 0.0};
  const auto c = compile_common_bath(2, w, kParams);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  EXPECT_TRUE(MatrixNear(induced_coefficients(c).emission, expected, 1e-12));
  EXPECT_EQ(c.gates.size(), 1u);
}

TEST(CommonBath, RankOneWeights) {
  const std::vector<double> w{1.0, 2.0};
  const auto c = compile_common_bath(2, w, kParams);
  Matrix expected(2, 2);
  expected << 1, 2, 2, 4;
  const Matrix got = induced_coefficients(c).emission;
  EXPECT_TRUE(MatrixNear(got, expected, 1e-12));
  EXPECT_NEAR(min_hermitian_eigenvalue(got), 0.0, 1e-12);
}

TEST(SystemGates, SplitAcrossKLocalTerms) {
  const TensorLayout l = TensorLayout::uniform(3, 2);
  KLocality kl{2, {{{0, 1}, {}}, {{0, 2}, {}}, {{1, 2}, {}}}};
  Matrix h = Matrix::Zero(8, 8);
  h += 0.7 * embed(kron(pauli_z(), pauli_z()), std::vector<std::size_t>{0, 1}, l);
  h += 0.2 * embed(kron(pauli_x(), pauli_x()), std::vector<std::size_t>{1, 2}, l);
  h += 0.4 * embed(pauli_y(), std::vector<std::size_t>{2}, l);
  h += 0.3 * embed(kron(pauli_x(), pauli_z()), std::vector<std::size_t>{0, 2}, l);
  const auto gates = system_gates(h, l, kParams, kl);
  EXPECT_EQ(gates.size(), 3u);
  Matrix sum = Matrix::Zero(8, 8);
  for (const auto& g : gates) sum += kParams.g_S * g.op.full(l);
  EXPECT_TRUE(MatrixNear(sum, h, 1e-12));
  EXPECT_EQ(system_gates(h, l, kParams).size(), 1u);
  // A three-body component cannot be placed in any pair term.
  const Matrix h3 = h + kron_all(std::vector<Matrix>{pauli_z(), pauli_z(), pauli_z()});
  EXPECT_EQ(system_gates(h3, l, kParams, kl).size(), 1u);
}

TEST(Schedule, SingleSegmentKeepsBase) {
  const auto base = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0), kParams);
  const auto pc = schedule_time_dependent(base, {ScheduleSegment{}});
  ASSERT_EQ(pc.circuits.size(), 1u);
  EXPECT_TRUE(MatrixNear(induced_coefficients(pc.circuits[0]).emission,
                         induced_coefficients(base).emission, 0.0));
}

TEST(Schedule, LambdaScalingChangesRates) {
  const auto base = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0), kParams);
  ScheduleSegment a;
  a.t_end = 0.5;
  ScheduleSegment b;
  b.t_start = 0.5;
  b.lambda_overrides = {{std::nullopt, 2.0}};
  const auto pc = schedule_time_dependent(base, {a, b});
  EXPECT_NEAR(induced_coefficients(pc.circuits[0]).emission(0, 0).real(), 1.0, 1e-12);
  EXPECT_NEAR(induced_coefficients(pc.circuits[1]).emission(0, 0).real(), 4.0, 1e-12);
  EXPECT_EQ(pc.segment_for_step(49), 0u);
  EXPECT_EQ(pc.segment_for_step(50), 1u);
}

TEST(Schedule, UnalignedBoundaryUsesStepStart) {
  const auto base = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0), kParams);
  ScheduleSegment a;
  a.t_end = 0.015;
  ScheduleSegment b;
  b.t_start = 0.015;
  const auto pc = schedule_time_dependent(base, {a, b});
  EXPECT_EQ(pc.segment_for_step(1), 0u);  // starts at 0.01
  EXPECT_EQ(pc.segment_for_step(2), 1u);  // starts at 0.02
}

TEST(Schedule, RejectsGapsAndOverlaps) {
  const auto base = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0), kParams);
  ScheduleSegment a;
  a.t_end = 0.5;
  ScheduleSegment gap;
  gap.t_start = 0.6;
  ScheduleSegment overlap;
  overlap.t_start = 0.4;
  ScheduleSegment late;
  late.t_start = 0.1;
  EXPECT_THROW(schedule_time_dependent(base, {a, gap}), std::invalid_argument);
  EXPECT_THROW(schedule_time_dependent(base, {a, overlap}), std::invalid_argument);
  EXPECT_THROW(schedule_time_dependent(base, {late}), std::invalid_argument);
}

TEST(Circuit, EmissionOnlyHasNoAbsorption) {
  std::mt19937_64 rng(34);
  const auto c = compile_nondiagonal(test::two_qubit_decay(test::random_dominant_psd(2, rng)),
                                     kParams);
  for (const auto& a : c.ancillas) EXPECT_EQ(a.c, 1.0);
  EXPECT_LE(max_abs(induced_coefficients(c).absorption), 0.0);
}

TEST(Circuit, CheckRejectsBadFraction) {
  auto c = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0), kParams);
  c.gates[0].fraction = 0.3;
  EXPECT_THROW(c.check(), std::invalid_argument);
}

}  // namespace
}  // namespace mcm

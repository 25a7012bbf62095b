#include <gtest/gtest.h>

#include <cmath>

#include "mcm/circuit_io.hpp"
#include "mcm/compiler.hpp"
#include "mcm/model_io.hpp"
#include "test_util.hpp"

namespace mcm {
namespace {

using test::MatrixNear;

const char* kCollective = R"({
  "version": 1,
  "system": {"M": 2, "d": 2},
  "hamiltonian": [{"coef": 0.5, "sites": [0, 1], "op": "ZZ"}],
  "gks_operators": [
    {"label": "a", "sites": [0], "op": "-"},
    {"label": "b", "sites": [1], "op": "-"}
  ],
  "kossakowski": [[1, 1], [1, 1]]
})";

std::string parse_error_path(const std::string& text) {
  try {
    parse_model(text);
  } catch (const ParseError& e) {
    return e.path();
  }
  return "<no error>";
}

TEST(ModelIo, ParsesCollectiveDecay) {
  const ModelDocument doc = parse_model(kCollective);
  EXPECT_EQ(doc.M, 2u);
  ASSERT_EQ(doc.gks_operators.size(), 2u);
  const GKLSModel m = to_model(doc);
  EXPECT_TRUE(MatrixNear(m.kossakowski, Matrix::Ones(2, 2), 0.0));
  EXPECT_TRUE(MatrixNear(m.gks_ops[1].full(m.layout),
                         embed(sigma_minus(), std::vector<std::size_t>{1}, m.layout), 0.0));
  EXPECT_TRUE(MatrixNear(m.hamiltonian, 0.5 * kron(pauli_z(), pauli_z()), 0.0));
  EXPECT_TRUE(validate(m).accepted());
}

TEST(ModelIo, EmitParseIsIdentity) {
  const ModelDocument doc = parse_model(kCollective);
  const std::string text = emit_model(doc);
  const ModelDocument again = parse_model(text);
  EXPECT_TRUE(again == doc);
  EXPECT_EQ(emit_model(again), text);
}

TEST(ModelIo, RoundTripPreservesAwkwardDoubles) {
  ModelDocument doc = parse_model(kCollective);
  Matrix g(2, 2);
  g << 0.1 + 0.2, Complex(1.0 / 3.0, -2e-17), Complex(1.0 / 3.0, 2e-17), std::sqrt(2.0);
  doc.kossakowski = g;
  const ModelDocument again = parse_model(emit_model(doc));
  EXPECT_TRUE(again == doc);
  EXPECT_EQ(again.kossakowski->coeff(0, 1), g(0, 1));
}

TEST(ModelIo, LindbladThermalScheduleRoundTrip) {
  const char* text = R"({
    "version": 1,
    "system": {"M": 2, "d": 2},
    "lindblad": [
      {"rate": 0.5, "label": "pair", "sites": [0, 1], "op": {"terms": [
        {"coef": 1, "string": "-I"}, {"coef": [0, 1], "string": "I-"}]}},
      {"rate": 0.25, "label": "m", "sites": [1], "op": {"matrix": [[0, 0], [[1, 0.5], 0]]}}
    ],
    "klocal": {"k": 2, "groups": [{"sites": [0, 1], "ops": [0, 1]}]},
    "schedule": [
      {"t_start": 0, "t_end": 0.5},
      {"t_start": 0.5, "lambda_scale": [{"ancilla": 0, "scale": 2}]}
    ]
  })";
  const ModelDocument doc = parse_model(text);
  EXPECT_TRUE(parse_model(emit_model(doc)) == doc);
  const GKLSModel m = to_model(doc);
  EXPECT_NEAR(m.kossakowski(0, 0).real(), 0.5, 0.0);
  EXPECT_NEAR(m.kossakowski(1, 1).real(), 0.25, 0.0);
  EXPECT_EQ(m.gks_ops[1].matrix(1, 0), Complex(1, 0.5));
  const auto sched = to_schedule(doc);
  ASSERT_EQ(sched.size(), 2u);
  EXPECT_EQ(sched[0].t_end, 0.5);
  EXPECT_TRUE(std::isinf(sched[1].t_end));

  const char* thermal = R"({"version": 1, "system": {"M": 1, "d": 2},
    "thermal": {"omega": 1.0, "T": "inf", "sites": [0]}})";
  const ModelDocument th = parse_model(thermal);
  EXPECT_TRUE(parse_model(emit_model(th)) == th);
  ASSERT_TRUE(thermal_bath(th).has_value());
  EXPECT_EQ(thermal_bath(th)->temperature.kind, Temperature::Kind::kInfinite);
}

TEST(ModelIo, OperatorSpecs) {
  const OperatorSpec pm{std::string("+-")};
  EXPECT_TRUE(MatrixNear(pm.matrix(2, 2), kron(sigma_plus(), sigma_minus()), 0.0));
  const OperatorSpec n{std::string("N")};
  Matrix up = Matrix::Zero(2, 2);
  up(0, 0) = 1.0;
  EXPECT_TRUE(MatrixNear(n.matrix(2, 1), up, 0.0));
  const OperatorSpec y{std::string("Y")};
  EXPECT_TRUE(MatrixNear(y.matrix(2, 1), pauli_y(), 0.0));
  EXPECT_THROW(pm.matrix(2, 3), std::invalid_argument);

  const OperatorSpec sum{std::vector<PauliTerm>{{1.0, "XI"}, {0.5, "IZ"}}};
  const auto pieces = sum.pieces({1, 3}, 2);
  ASSERT_EQ(pieces.size(), 2u);
  EXPECT_EQ(pieces[0].sites, (std::vector<std::size_t>{1}));
  EXPECT_EQ(pieces[1].sites, (std::vector<std::size_t>{3}));
  EXPECT_TRUE(MatrixNear(pieces[1].matrix, 0.5 * pauli_z(), 0.0));
}

TEST(ModelIo, ErrorsNameTheField) {
  EXPECT_EQ(parse_error_path("{]"), "");
  EXPECT_EQ(parse_error_path(R"({"system": {"M": 1, "d": 2}})"), "version");
  EXPECT_EQ(parse_error_path(R"({"version": 2, "system": {"M": 1, "d": 2}})"), "version");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 0, "d": 2}})"), "system.M");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 1, "d": 2},
    "gks_operators": [{"label": "a", "sites": [0], "op": "Q"}], "kossakowski": [[1]]})"),
            "gks_operators[0].op");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 1, "d": 2},
    "gks_operators": [{"label": "a", "sites": [3], "op": "-"}], "kossakowski": [[1]]})"),
            "gks_operators[0].sites[0]");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 1, "d": 2},
    "gks_operators": [{"label": "a", "sites": [0], "op": "-"}]})"),
            "kossakowski");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 1, "d": 2},
    "lindblad": [{"rate": -1, "label": "a", "sites": [0], "op": "-"}]})"),
            "lindblad[0].rate");
  EXPECT_EQ(parse_error_path(R"({"version": 1, "system": {"M": 1, "d": 3},
    "thermal": {"omega": 1, "T": 1, "sites": [0]}})"),
            "thermal");
  EXPECT_THROW(load_model("/nonexistent/model.json"), ParseError);
}

TEST(CircuitIo, RoundTripAcrossCompilers) {
  std::mt19937_64 rng(71);
  std::vector<CollisionCircuit> circuits;
  const Matrix h = test::random_hermitian(4, rng);
  circuits.push_back(compile_nondiagonal(
      test::two_qubit_decay(test::random_dominant_psd(2, rng), h), StepParams::from_gamma(1.3, 0.01)));
  circuits.push_back(compile_diagonal(diagonalize(test::two_qubit_decay(Matrix::Ones(2, 2))),
                                      StepParams::from_gamma(1.0, 0.02)));
  circuits.push_back(compile_thermal({0.7, Temperature::finite(0.9), {0, 1}, 0.3},
                                     TensorLayout::uniform(2, 2), StepParams::from_gamma(1.0, 0.01)));
  for (const auto& c : circuits) {
    const std::string text = emit_circuit(c);
    const CollisionCircuit back = parse_circuit(text);
    EXPECT_TRUE(circuits_equal(back, c));
    EXPECT_EQ(emit_circuit(back), text);
  }
  EXPECT_FALSE(circuits_equal(circuits[0], circuits[1]));
}

TEST(CircuitIo, RejectsMalformedDocuments) {
  const auto c = compile_nondiagonal(test::single_qubit(sigma_minus(), 1.0),
                                     StepParams::from_gamma(1.0, 0.01));
  std::string text = emit_circuit(c);
  EXPECT_THROW(parse_circuit("{}"), ParseError);
  const auto pos = text.find("\"fraction\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 13, "\"fraction\": 0.25");
  EXPECT_THROW(parse_circuit(text), ParseError);
}

}  // namespace
}  // namespace mcm

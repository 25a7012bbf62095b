#pragma once

#include <string>

#include "mcm/circuit.hpp"

namespace mcm {

/// Versioned JSON export of a compiled circuit: system dims, step
/// parameters, targets, ancillas (id, c, label, couplings) and gates in
/// execution order (generator matrix, sites, ancilla, lambda, fraction,
/// coupling constant name).
std::string emit_circuit(const CollisionCircuit& circuit);

/// Inverse of emit_circuit; throws ParseError with the field path.
CollisionCircuit parse_circuit(const std::string& text);

CollisionCircuit load_circuit(const std::string& path);

/// Structural equality (exact, including floating-point values).
bool circuits_equal(const CollisionCircuit& a, const CollisionCircuit& b);

}  // namespace mcm

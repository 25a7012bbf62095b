#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mcm/compiler.hpp"

namespace mcm {

/// Malformed document. `path` names the offending field, e.g.
/// "gks_operators[1].op".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// One product of single-site letters I X Y Z + - N (N = |up><up|), one
/// letter per listed site.
struct PauliTerm {
  Complex coef{1.0, 0.0};
  std::string letters;
  bool operator==(const PauliTerm&) const = default;
};

/// Operator written as a single Pauli string, a sum of them, or an explicit
/// matrix on the listed sites.
struct OperatorSpec {
  std::variant<std::string, std::vector<PauliTerm>, Matrix> form;

  Matrix matrix(std::size_t d, std::size_t n_sites) const;
  /// Per-term pieces restricted to the sites where each term acts
  /// nontrivially (empty for explicit matrices).
  std::vector<LocalOperator> pieces(const std::vector<std::size_t>& sites, std::size_t d) const;
};

bool operator==(const OperatorSpec& a, const OperatorSpec& b);

struct HamiltonianTerm {
  Complex coef{1.0, 0.0};
  std::vector<std::size_t> sites;
  OperatorSpec op;
};

struct GksEntry {
  std::string label;
  std::vector<std::size_t> sites;
  OperatorSpec op;
};

struct LindbladEntry {
  double rate = 0.0;
  std::string label;
  std::vector<std::size_t> sites;
  OperatorSpec op;
};

struct ThermalSpec {
  double omega = 1.0;
  Temperature T;
  std::vector<std::size_t> sites;
  double gamma0 = 1.0;
};

struct ScheduleSpec {
  double t_start = 0.0;
  std::optional<double> t_end;  // open-ended when unset
  std::vector<LambdaOverride> lambda_overrides;
  std::optional<std::vector<HamiltonianTerm>> hamiltonian;
};

struct ModelDocument {
  int version = 1;
  std::size_t M = 1;
  std::size_t d = 2;
  std::vector<HamiltonianTerm> hamiltonian;
  std::vector<GksEntry> gks_operators;
  std::optional<Matrix> kossakowski;
  std::vector<LindbladEntry> lindblad;
  std::optional<KLocality> klocal;
  std::optional<ThermalSpec> thermal;
  std::vector<ScheduleSpec> schedule;

  TensorLayout layout() const { return TensorLayout::uniform(M, d); }
};

bool operator==(const ModelDocument& a, const ModelDocument& b);

/// Parses the JSON model document; throws ParseError.
ModelDocument parse_model(const std::string& text);
ModelDocument load_model(const std::string& path);
/// Canonical JSON text; parse_model(emit_model(doc)) == doc.
std::string emit_model(const ModelDocument& doc);

Matrix hamiltonian_matrix(const std::vector<HamiltonianTerm>& terms, const TensorLayout& layout);

/// GKLS model described by the document (thermal baths become their target
/// master equation). Does not validate.
GKLSModel to_model(const ModelDocument& doc);

std::vector<ScheduleSegment> to_schedule(const ModelDocument& doc);

std::optional<ThermalBath> thermal_bath(const ModelDocument& doc);

}  // namespace mcm

#include "mcm/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "json_util.hpp"

namespace mcm {

using json = nlohmann::ordered_json;

namespace {

Matrix letter(char c) {
  switch (c) {
    case 'I': return identity(2);
    case 'X': return pauli_x();
    case 'Y': return pauli_y();
    case 'Z': return pauli_z();
    case '+': return sigma_plus();
    case '-': return sigma_minus();
    case 'N': return sigma_plus() * sigma_minus();
    default: throw std::invalid_argument(std::string("unknown operator letter '") + c + "'");
  }
}

Matrix string_matrix(const std::string& s, std::size_t d, std::size_t n_sites) {
  if (s.size() != n_sites) {
    throw std::invalid_argument("operator string '" + s + "' has " + std::to_string(s.size()) +
                                " letters for " + std::to_string(n_sites) + " sites");
  }
  if (d != 2 && s.find_first_not_of('I') != std::string::npos) {
    throw std::invalid_argument("operator letters other than I need d = 2");
  }
  Matrix m = Matrix::Identity(1, 1);
  for (char c : s) m = kron(m, c == 'I' ? identity(d) : letter(c));
  return m;
}

bool matrices_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}

// ---- parsing ---------------------------------------------------------------

std::vector<std::size_t> parse_sites(const json& j, const std::string& path, std::size_t M) {
  if (!j.is_array()) throw ParseError(path, "expected an array of site indices");
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    if (!j[i].is_number_unsigned()) throw ParseError(p, "expected a nonnegative integer");
    const auto s = j[i].get<std::size_t>();
    if (s >= M) throw ParseError(p, "site " + std::to_string(s) + " out of range");
    if (!sites.empty() && s <= sites.back()) throw ParseError(p, "sites must be increasing");
    sites.push_back(s);
  }
  return sites;
}

OperatorSpec parse_op(const json& j, const std::string& path) {
  if (j.is_string()) return {j.get<std::string>()};
  if (!j.is_object()) throw ParseError(path, "expected a Pauli string or an object");
  if (j.contains("terms")) {
    const json& terms = j.at("terms");
    if (!terms.is_array() || terms.empty()) {
      throw ParseError(path + ".terms", "expected a nonempty array");
    }
    std::vector<PauliTerm> out;
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const std::string p = path + ".terms[" + std::to_string(i) + "]";
      const json& t = terms[i];
      if (!t.is_object() || !t.contains("string") || !t.at("string").is_string()) {
        throw ParseError(p, "expected {\"coef\": ..., \"string\": ...}");
      }
      PauliTerm term;
      term.letters = t.at("string").get<std::string>();
      if (t.contains("coef")) term.coef = jsonio::parse_complex(t.at("coef"), p + ".coef");
      out.push_back(std::move(term));
    }
    return {std::move(out)};
  }
  if (j.contains("matrix")) return {jsonio::parse_matrix(j.at("matrix"), path + ".matrix")};
  throw ParseError(path, "operator object needs \"terms\" or \"matrix\"");
}

// Checks that the operator spec fits its sites.
void check_op(const OperatorSpec& op, std::size_t d, std::size_t n_sites,
              const std::string& path) {
  try {
    (void)op.matrix(d, n_sites);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, e.what());
  }
}

std::vector<HamiltonianTerm> parse_hamiltonian(const json& j, const std::string& path,
                                               std::size_t M, std::size_t d) {
  if (!j.is_array()) throw ParseError(path, "expected an array of terms");
  std::vector<HamiltonianTerm> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    if (!t.is_object()) throw ParseError(p, "expected an object");
    HamiltonianTerm term;
    if (t.contains("coef")) term.coef = jsonio::parse_complex(t.at("coef"), p + ".coef");
    if (!t.contains("op")) throw ParseError(p, "missing \"op\"");
    term.op = parse_op(t.at("op"), p + ".op");
    if (t.contains("sites")) {
      term.sites = parse_sites(t.at("sites"), p + ".sites", M);
    } else {
      for (std::size_t s = 0; s < M; ++s) term.sites.push_back(s);
    }
    check_op(term.op, d, term.sites.size(), p + ".op");
    out.push_back(std::move(term));
  }
  return out;
}

Temperature parse_temperature(const json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return Temperature::infinite();
    throw ParseError(path, "expected a number or \"inf\"");
  }
  if (!j.is_number()) throw ParseError(path, "expected a number or \"inf\"");
  return Temperature::finite(j.get<double>());
}

double number(const json& obj, const char* key, const std::string& path,
              std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw ParseError(path, std::string("missing \"") + key + "\"");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::string label_of(const json& obj, const std::string& path) {
  if (!obj.contains("label")) return {};
  if (!obj.at("label").is_string()) throw ParseError(path + ".label", "expected a string");
  return obj.at("label").get<std::string>();
}

// ---- emission --------------------------------------------------------------

json emit_op(const OperatorSpec& op) {
  if (const auto* s = std::get_if<std::string>(&op.form)) return *s;
  if (const auto* terms = std::get_if<std::vector<PauliTerm>>(&op.form)) {
    json arr = json::array();
    for (const auto& t : *terms) {
      json jt;
      jt["coef"] = jsonio::emit_complex(t.coef);
      jt["string"] = t.letters;
      arr.push_back(std::move(jt));
    }
    json o;
    o["terms"] = std::move(arr);
    return o;
  }
  json o;
  o["matrix"] = jsonio::emit_matrix(std::get<Matrix>(op.form));
  return o;
}

json emit_hamiltonian(const std::vector<HamiltonianTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms) {
    json jt;
    jt["coef"] = jsonio::emit_complex(t.coef);
    jt["sites"] = t.sites;
    jt["op"] = emit_op(t.op);
    arr.push_back(std::move(jt));
  }
  return arr;
}

json emit_temperature(const Temperature& T) {
  switch (T.kind) {
    case Temperature::Kind::kInfinite: return "inf";
    case Temperature::Kind::kZero: return 0.0;
    case Temperature::Kind::kFinite: break;
  }
  return T.value;
}

}  // namespace

Matrix OperatorSpec::matrix(std::size_t d, std::size_t n_sites) const {
  if (const auto* s = std::get_if<std::string>(&form)) return string_matrix(*s, d, n_sites);
  std::size_t dim = 1;
  for (std::size_t i = 0; i < n_sites; ++i) dim *= d;
  if (const auto* terms = std::get_if<std::vector<PauliTerm>>(&form)) {
    const auto n = static_cast<Eigen::Index>(dim);
    Matrix m = Matrix::Zero(n, n);
    for (const auto& t : *terms) m += t.coef * string_matrix(t.letters, d, n_sites);
    return m;
  }
  const Matrix& m = std::get<Matrix>(form);
  if (m.rows() != static_cast<Eigen::Index>(dim) || m.cols() != m.rows()) {
    throw std::invalid_argument("matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", sites need dimension " +
                                std::to_string(dim));
  }
  return m;
}

std::vector<LocalOperator> OperatorSpec::pieces(const std::vector<std::size_t>& sites,
                                                std::size_t d) const {
  std::vector<PauliTerm> terms;
  if (const auto* s = std::get_if<std::string>(&form)) {
    terms.push_back({Complex{1.0, 0.0}, *s});
  } else if (const auto* ts = std::get_if<std::vector<PauliTerm>>(&form)) {
    terms = *ts;
  } else {
    return {};
  }
  std::vector<LocalOperator> out;
  for (const auto& t : terms) {
    std::vector<std::size_t> support;
    std::string letters;
    for (std::size_t i = 0; i < t.letters.size(); ++i) {
      if (t.letters[i] != 'I') {
        support.push_back(sites[i]);
        letters.push_back(t.letters[i]);
      }
    }
    if (support.empty()) {
      support = sites;
      letters = t.letters;
    }
    out.push_back({support, t.coef * string_matrix(letters, d, letters.size()), t.letters});
  }
  return out;
}

bool operator==(const OperatorSpec& a, const OperatorSpec& b) {
  if (a.form.index() != b.form.index()) return false;
  if (const auto* m = std::get_if<Matrix>(&a.form)) return matrices_equal(*m, std::get<Matrix>(b.form));
  if (const auto* s = std::get_if<std::string>(&a.form)) return *s == std::get<std::string>(b.form);
  return std::get<std::vector<PauliTerm>>(a.form) == std::get<std::vector<PauliTerm>>(b.form);
}

namespace {

bool same(const HamiltonianTerm& a, const HamiltonianTerm& b) {
  return a.coef == b.coef && a.sites == b.sites && a.op == b.op;
}

template <typename T, typename Eq>
bool all_same(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!eq(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

bool operator==(const ModelDocument& a, const ModelDocument& b) {
  auto ham_eq = [](const std::vector<HamiltonianTerm>& x, const std::vector<HamiltonianTerm>& y) {
    return all_same(x, y, same);
  };
  if (a.version != b.version || a.M != b.M || a.d != b.d) return false;
  if (!ham_eq(a.hamiltonian, b.hamiltonian)) return false;
  if (!all_same(a.gks_operators, b.gks_operators, [](const GksEntry& x, const GksEntry& y) {
        return x.label == y.label && x.sites == y.sites && x.op == y.op;
      })) {
    return false;
  }
  if (a.kossakowski.has_value() != b.kossakowski.has_value()) return false;
  if (a.kossakowski && !matrices_equal(*a.kossakowski, *b.kossakowski)) return false;
  if (!all_same(a.lindblad, b.lindblad, [](const LindbladEntry& x, const LindbladEntry& y) {
        return x.rate == y.rate && x.label == y.label && x.sites == y.sites && x.op == y.op;
      })) {
    return false;
  }
  if (a.klocal.has_value() != b.klocal.has_value()) return false;
  if (a.klocal && (a.klocal->k != b.klocal->k || a.klocal->terms != b.klocal->terms)) return false;
  if (a.thermal.has_value() != b.thermal.has_value()) return false;
  if (a.thermal) {
    const auto& x = *a.thermal;
    const auto& y = *b.thermal;
    if (x.omega != y.omega || x.T.kind != y.T.kind || x.T.value != y.T.value ||
        x.sites != y.sites || x.gamma0 != y.gamma0) {
      return false;
    }
  }
  return all_same(a.schedule, b.schedule, [&](const ScheduleSpec& x, const ScheduleSpec& y) {
    if (x.t_start != y.t_start || x.t_end != y.t_end) return false;
    if (!all_same(x.lambda_overrides, y.lambda_overrides,
                  [](const LambdaOverride& p, const LambdaOverride& q) {
                    return p.ancilla == q.ancilla && p.scale == q.scale;
                  })) {
      return false;
    }
    if (x.hamiltonian.has_value() != y.hamiltonian.has_value()) return false;
    return !x.hamiltonian || ham_eq(*x.hamiltonian, *y.hamiltonian);
  });
}

ModelDocument parse_model(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("", "document must be a JSON object");

  ModelDocument doc;
  if (!root.contains("version")) throw ParseError("version", "missing");
  if (!root.at("version").is_number_integer() || root.at("version").get<int>() != 1) {
    throw ParseError("version", "unsupported version (expected 1)");
  }
  if (!root.contains("system") || !root.at("system").is_object()) {
    throw ParseError("system", "missing or not an object");
  }
  const json& sys = root.at("system");
  for (const char* key : {"M", "d"}) {
    if (!sys.contains(key) || !sys.at(key).is_number_unsigned() || sys.at(key).get<std::size_t>() == 0) {
      throw ParseError(std::string("system.") + key, "expected a positive integer");
    }
  }
  doc.M = sys.at("M").get<std::size_t>();
  doc.d = sys.at("d").get<std::size_t>();

  if (root.contains("hamiltonian")) {
    doc.hamiltonian = parse_hamiltonian(root.at("hamiltonian"), "hamiltonian", doc.M, doc.d);
  }

  if (root.contains("gks_operators")) {
    const json& arr = root.at("gks_operators");
    if (!arr.is_array()) throw ParseError("gks_operators", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "gks_operators[" + std::to_string(i) + "]";
      const json& e = arr[i];
      if (!e.is_object()) throw ParseError(p, "expected an object");
      GksEntry g;
      g.label = label_of(e, p);
      if (!e.contains("sites")) throw ParseError(p, "missing \"sites\"");
      g.sites = parse_sites(e.at("sites"), p + ".sites", doc.M);
      if (g.sites.empty()) throw ParseError(p + ".sites", "must not be empty");
      if (!e.contains("op")) throw ParseError(p, "missing \"op\"");
      g.op = parse_op(e.at("op"), p + ".op");
      check_op(g.op, doc.d, g.sites.size(), p + ".op");
      doc.gks_operators.push_back(std::move(g));
    }
    if (!root.contains("kossakowski")) {
      throw ParseError("kossakowski", "required together with gks_operators");
    }
  }
  if (root.contains("kossakowski")) {
    doc.kossakowski = jsonio::parse_matrix(root.at("kossakowski"), "kossakowski");
    const auto J = static_cast<Eigen::Index>(doc.gks_operators.size());
    if (doc.kossakowski->rows() != J || doc.kossakowski->cols() != J) {
      throw ParseError("kossakowski", "must be " + std::to_string(J) + "x" + std::to_string(J));
    }
  }

  if (root.contains("lindblad")) {
    if (root.contains("gks_operators")) {
      throw ParseError("lindblad", "give either gks_operators or lindblad, not both");
    }
    const json& arr = root.at("lindblad");
    if (!arr.is_array()) throw ParseError("lindblad", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "lindblad[" + std::to_string(i) + "]";
      const json& e = arr[i];
      if (!e.is_object()) throw ParseError(p, "expected an object");
      LindbladEntry l;
      l.rate = number(e, "rate", p);
      if (!(l.rate >= 0.0)) throw ParseError(p + ".rate", "must be nonnegative");
      l.label = label_of(e, p);
      if (!e.contains("sites")) throw ParseError(p, "missing \"sites\"");
      l.sites = parse_sites(e.at("sites"), p + ".sites", doc.M);
      if (l.sites.empty()) throw ParseError(p + ".sites", "must not be empty");
      if (!e.contains("op")) throw ParseError(p, "missing \"op\"");
      l.op = parse_op(e.at("op"), p + ".op");
      check_op(l.op, doc.d, l.sites.size(), p + ".op");
      doc.lindblad.push_back(std::move(l));
    }
  }

  if (root.contains("klocal")) {
    const json& kl = root.at("klocal");
    if (!kl.is_object()) throw ParseError("klocal", "expected an object");
    KLocality k;
    if (!kl.contains("k") || !kl.at("k").is_number_unsigned()) {
      throw ParseError("klocal.k", "expected a positive integer");
    }
    k.k = kl.at("k").get<std::size_t>();
    if (!kl.contains("groups") || !kl.at("groups").is_array()) {
      throw ParseError("klocal.groups", "expected an array");
    }
    const json& groups = kl.at("groups");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const std::string p = "klocal.groups[" + std::to_string(i) + "]";
      const json& g = groups[i];
      if (!g.is_object() || !g.contains("sites")) throw ParseError(p, "expected {sites, ops}");
      KLocalTerm term;
      term.sites = parse_sites(g.at("sites"), p + ".sites", doc.M);
      if (g.contains("ops")) {
        const json& ops = g.at("ops");
        if (!ops.is_array()) throw ParseError(p + ".ops", "expected an array");
        for (std::size_t o = 0; o < ops.size(); ++o) {
          if (!ops[o].is_number_unsigned()) {
            throw ParseError(p + ".ops[" + std::to_string(o) + "]", "expected an operator index");
          }
          term.ops.push_back(ops[o].get<std::size_t>());
        }
      }
      k.terms.push_back(std::move(term));
    }
    doc.klocal = std::move(k);
  }

  if (root.contains("thermal")) {
    const json& th = root.at("thermal");
    if (!th.is_object()) throw ParseError("thermal", "expected an object");
    ThermalSpec t;
    t.omega = number(th, "omega", "thermal");
    if (!th.contains("T")) throw ParseError("thermal", "missing \"T\"");
    t.T = parse_temperature(th.at("T"), "thermal.T");
    if (!th.contains("sites")) throw ParseError("thermal", "missing \"sites\"");
    t.sites = parse_sites(th.at("sites"), "thermal.sites", doc.M);
    t.gamma0 = number(th, "gamma0", "thermal", 1.0);
    if (doc.d != 2) throw ParseError("thermal", "thermal baths need qubits (d = 2)");
    doc.thermal = std::move(t);
  }

  if (root.contains("schedule")) {
    const json& arr = root.at("schedule");
    if (!arr.is_array()) throw ParseError("schedule", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = "schedule[" + std::to_string(i) + "]";
      const json& e = arr[i];
      if (!e.is_object()) throw ParseError(p, "expected an object");
      ScheduleSpec s;
      s.t_start = number(e, "t_start", p);
      if (e.contains("t_end")) s.t_end = number(e, "t_end", p);
      if (e.contains("lambda_scale")) {
        const json& ls = e.at("lambda_scale");
        if (!ls.is_array()) throw ParseError(p + ".lambda_scale", "expected an array");
        for (std::size_t o = 0; o < ls.size(); ++o) {
          const std::string q = p + ".lambda_scale[" + std::to_string(o) + "]";
          if (!ls[o].is_object() || !ls[o].contains("scale")) {
            throw ParseError(q, "expected {ancilla?, scale}");
          }
          LambdaOverride ov;
          if (ls[o].contains("ancilla")) {
            if (!ls[o].at("ancilla").is_number_unsigned()) {
              throw ParseError(q + ".ancilla", "expected an ancilla index");
            }
            ov.ancilla = ls[o].at("ancilla").get<std::size_t>();
          }
          ov.scale = jsonio::parse_complex(ls[o].at("scale"), q + ".scale");
          s.lambda_overrides.push_back(ov);
        }
      }
      if (e.contains("hamiltonian")) {
        s.hamiltonian = parse_hamiltonian(e.at("hamiltonian"), p + ".hamiltonian", doc.M, doc.d);
      }
      doc.schedule.push_back(std::move(s));
    }
  }
  return doc;
}

ModelDocument load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_model(ss.str());
}

std::string emit_model(const ModelDocument& doc) {
  json root;
  root["version"] = doc.version;
  root["system"] = {{"M", doc.M}, {"d", doc.d}};
  if (!doc.hamiltonian.empty()) root["hamiltonian"] = emit_hamiltonian(doc.hamiltonian);
  if (!doc.gks_operators.empty()) {
    json arr = json::array();
    for (const auto& g : doc.gks_operators) {
      json e;
      e["label"] = g.label;
      e["sites"] = g.sites;
      e["op"] = emit_op(g.op);
      arr.push_back(std::move(e));
    }
    root["gks_operators"] = std::move(arr);
  }
  if (doc.kossakowski) root["kossakowski"] = jsonio::emit_matrix(*doc.kossakowski);
  if (!doc.lindblad.empty()) {
    json arr = json::array();
    for (const auto& l : doc.lindblad) {
      json e;
      e["rate"] = l.rate;
      e["label"] = l.label;
      e["sites"] = l.sites;
      e["op"] = emit_op(l.op);
      arr.push_back(std::move(e));
    }
    root["lindblad"] = std::move(arr);
  }
  if (doc.klocal) {
    json groups = json::array();
    for (const auto& t : doc.klocal->terms) {
      json g;
      g["sites"] = t.sites;
      g["ops"] = t.ops;
      groups.push_back(std::move(g));
    }
    root["klocal"] = {{"k", doc.klocal->k}, {"groups", std::move(groups)}};
  }
  if (doc.thermal) {
    json th;
    th["omega"] = doc.thermal->omega;
    th["T"] = emit_temperature(doc.thermal->T);
    th["sites"] = doc.thermal->sites;
    th["gamma0"] = doc.thermal->gamma0;
    root["thermal"] = std::move(th);
  }
  if (!doc.schedule.empty()) {
    json arr = json::array();
    for (const auto& s : doc.schedule) {
      json e;
      e["t_start"] = s.t_start;
      if (s.t_end) e["t_end"] = *s.t_end;
      if (!s.lambda_overrides.empty()) {
        json ls = json::array();
        for (const auto& ov : s.lambda_overrides) {
          json o;
          if (ov.ancilla) o["ancilla"] = *ov.ancilla;
          o["scale"] = jsonio::emit_complex(ov.scale);
          ls.push_back(std::move(o));
        }
        e["lambda_scale"] = std::move(ls);
      }
      if (s.hamiltonian) e["hamiltonian"] = emit_hamiltonian(*s.hamiltonian);
      arr.push_back(std::move(e));
    }
    root["schedule"] = std::move(arr);
  }
  return root.dump(2) + "\n";
}

Matrix hamiltonian_matrix(const std::vector<HamiltonianTerm>& terms, const TensorLayout& layout) {
  const auto D = static_cast<Eigen::Index>(layout.total_dim());
  Matrix h = Matrix::Zero(D, D);
  for (const auto& t : terms) {
    const Matrix local = t.op.matrix(layout.dim(0), t.sites.size());
    h += t.coef * embed(local, t.sites, layout);
  }
  return h;
}

std::optional<ThermalBath> thermal_bath(const ModelDocument& doc) {
  if (!doc.thermal) return std::nullopt;
  return ThermalBath{doc.thermal->omega, doc.thermal->T, doc.thermal->sites,
                     doc.thermal->gamma0};
}

GKLSModel to_model(const ModelDocument& doc) {
  const TensorLayout layout = doc.layout();
  const Matrix h = hamiltonian_matrix(doc.hamiltonian, layout);
  if (doc.thermal) {
    GKLSModel m = thermal_target_model(*thermal_bath(doc), layout, h);
    m.klocal = doc.klocal;
    return m;
  }
  GKLSModel m;
  m.layout = layout;
  m.hamiltonian = h;
  m.klocal = doc.klocal;
  bool any_pieces = false;
  auto add = [&](const std::string& label, const std::vector<std::size_t>& sites,
                 const OperatorSpec& op) {
    m.gks_ops.push_back({sites, op.matrix(doc.d, sites.size()), label});
    auto pieces = op.pieces(sites, doc.d);
    any_pieces = any_pieces || pieces.size() > 1 ||
                 (pieces.size() == 1 && pieces.front().sites != sites);
    if (pieces.empty()) pieces.push_back(m.gks_ops.back());
    m.gks_terms.push_back(std::move(pieces));
  };
  if (!doc.lindblad.empty()) {
    const auto J = static_cast<Eigen::Index>(doc.lindblad.size());
    m.kossakowski = Matrix::Zero(J, J);
    for (Eigen::Index j = 0; j < J; ++j) {
      const auto& l = doc.lindblad[static_cast<std::size_t>(j)];
      add(l.label, l.sites, l.op);
      m.kossakowski(j, j) = l.rate;
    }
  } else {
    for (const auto& g : doc.gks_operators) add(g.label, g.sites, g.op);
    m.kossakowski = doc.kossakowski.value_or(Matrix::Zero(0, 0));
  }
  if (!any_pieces) m.gks_terms.clear();
  return m;
}

std::vector<ScheduleSegment> to_schedule(const ModelDocument& doc) {
  std::vector<ScheduleSegment> out;
  for (const auto& s : doc.schedule) {
    ScheduleSegment seg;
    seg.t_start = s.t_start;
    seg.t_end = s.t_end.value_or(std::numeric_limits<double>::infinity());
    seg.lambda_overrides = s.lambda_overrides;
    if (s.hamiltonian) seg.hamiltonian = hamiltonian_matrix(*s.hamiltonian, doc.layout());
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace mcm

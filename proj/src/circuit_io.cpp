#include "mcm/circuit_io.hpp"

#include <fstream>
#include <sstream>

#include "json_util.hpp"

namespace mcm {

using json = nlohmann::ordered_json;

namespace {

json emit_local(const LocalOperator& op) {
  json o;
  o["label"] = op.label;
  o["sites"] = op.sites;
  o["matrix"] = jsonio::emit_matrix(op.matrix);
  return o;
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ParseError(path, std::string("missing \"") + key + "\"");
  }
  return obj.at(key);
}

double num(const json& obj, const char* key, const std::string& path) {
  const json& v = field(obj, key, path);
  if (!v.is_number()) throw ParseError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::size_t index(const json& v, const std::string& path) {
  if (!v.is_number_unsigned()) throw ParseError(path, "expected a nonnegative integer");
  return v.get<std::size_t>();
}

std::vector<std::size_t> index_list(const json& v, const std::string& path) {
  if (!v.is_array()) throw ParseError(path, "expected an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(index(v[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

LocalOperator parse_local(const json& j, const std::string& path) {
  LocalOperator op;
  const json& label = field(j, "label", path);
  if (!label.is_string()) throw ParseError(path + ".label", "expected a string");
  op.label = label.get<std::string>();
  op.sites = index_list(field(j, "sites", path), path + ".sites");
  op.matrix = jsonio::parse_matrix(field(j, "matrix", path), path + ".matrix");
  return op;
}

json emit_gate(const ElementaryGate& g) {
  json o;
  o["op"] = emit_local(g.op);
  if (g.ancilla) o["ancilla"] = *g.ancilla;
  o["lambda"] = jsonio::emit_complex(g.lambda);
  o["fraction"] = g.fraction;
  o["coupling"] = g.coupling == Coupling::kSystem ? "g_S" : "g_I";
  return o;
}

ElementaryGate parse_gate(const json& j, const std::string& path) {
  ElementaryGate g;
  g.op = parse_local(field(j, "op", path), path + ".op");
  if (j.contains("ancilla")) g.ancilla = index(j.at("ancilla"), path + ".ancilla");
  g.lambda = jsonio::parse_complex(field(j, "lambda", path), path + ".lambda");
  g.fraction = num(j, "fraction", path);
  const json& c = field(j, "coupling", path);
  if (c == "g_I") {
    g.coupling = Coupling::kInteraction;
  } else if (c == "g_S") {
    g.coupling = Coupling::kSystem;
  } else {
    throw ParseError(path + ".coupling", "expected \"g_I\" or \"g_S\"");
  }
  return g;
}

bool same_local(const LocalOperator& a, const LocalOperator& b) {
  return a.label == b.label && a.sites == b.sites && a.matrix.rows() == b.matrix.rows() &&
         a.matrix.cols() == b.matrix.cols() && a.matrix == b.matrix;
}

bool same_gate(const ElementaryGate& a, const ElementaryGate& b) {
  return same_local(a.op, b.op) && a.lambda == b.lambda && a.ancilla == b.ancilla &&
         a.fraction == b.fraction && a.coupling == b.coupling;
}

}  // namespace

std::string emit_circuit(const CollisionCircuit& circuit) {
  json root;
  root["version"] = 1;
  root["kind"] = "mcm-circuit";
  std::vector<std::size_t> sys_dims(circuit.layout.dims().begin(),
                                    circuit.layout.dims().begin() +
                                        static_cast<long>(circuit.system_factors));
  root["system_dims"] = sys_dims;
  root["params"] = {{"dt", circuit.params.dt},
                    {"g_I", circuit.params.g_I},
                    {"g_S", circuit.params.g_S},
                    {"gamma", circuit.params.gamma}};
  json targets = json::array();
  for (const auto& t : circuit.targets) targets.push_back(emit_local(t));
  root["targets"] = std::move(targets);
  json ancillas = json::array();
  for (const auto& a : circuit.ancillas) {
    json o;
    o["id"] = a.id;
    o["c"] = a.c;
    o["label"] = a.label;
    json cps = json::array();
    for (const auto& cp : a.couplings) {
      cps.push_back({{"target", cp.target}, {"lambda", jsonio::emit_complex(cp.lambda)}});
    }
    o["couplings"] = std::move(cps);
    ancillas.push_back(std::move(o));
  }
  root["ancillas"] = std::move(ancillas);
  json gates = json::array();
  for (const auto& g : circuit.gates) gates.push_back(emit_gate(g));
  root["gates"] = std::move(gates);
  json sgates = json::array();
  for (const auto& g : circuit.system_gates) sgates.push_back(emit_gate(g));
  root["system_gates"] = std::move(sgates);
  return root.dump(2) + "\n";
}

CollisionCircuit parse_circuit(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ParseError("", "document must be a JSON object");
  const json& version = field(root, "version", "");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw ParseError("version", "unsupported version (expected 1)");
  }
  if (field(root, "kind", "") != "mcm-circuit") {
    throw ParseError("kind", "not a circuit document");
  }
  CollisionCircuit c;
  std::vector<std::size_t> dims = index_list(field(root, "system_dims", ""), "system_dims");
  c.system_factors = dims.size();
  const json& params = field(root, "params", "");
  c.params.dt = num(params, "dt", "params");
  c.params.g_I = num(params, "g_I", "params");
  c.params.g_S = num(params, "g_S", "params");
  c.params.gamma = num(params, "gamma", "params");

  const json& targets = field(root, "targets", "");
  if (!targets.is_array()) throw ParseError("targets", "expected an array");
  for (std::size_t i = 0; i < targets.size(); ++i) {
    c.targets.push_back(parse_local(targets[i], "targets[" + std::to_string(i) + "]"));
  }
  const json& ancillas = field(root, "ancillas", "");
  if (!ancillas.is_array()) throw ParseError("ancillas", "expected an array");
  for (std::size_t i = 0; i < ancillas.size(); ++i) {
    const std::string p = "ancillas[" + std::to_string(i) + "]";
    const json& a = ancillas[i];
    AncillaSpec spec;
    spec.id = index(field(a, "id", p), p + ".id");
    spec.c = num(a, "c", p);
    const json& label = field(a, "label", p);
    if (!label.is_string()) throw ParseError(p + ".label", "expected a string");
    spec.label = label.get<std::string>();
    const json& cps = field(a, "couplings", p);
    if (!cps.is_array()) throw ParseError(p + ".couplings", "expected an array");
    for (std::size_t k = 0; k < cps.size(); ++k) {
      const std::string q = p + ".couplings[" + std::to_string(k) + "]";
      spec.couplings.push_back({index(field(cps[k], "target", q), q + ".target"),
                                jsonio::parse_complex(field(cps[k], "lambda", q), q + ".lambda")});
    }
    c.ancillas.push_back(std::move(spec));
    dims.push_back(2);
  }
  c.layout = TensorLayout(dims);
  const json& gates = field(root, "gates", "");
  if (!gates.is_array()) throw ParseError("gates", "expected an array");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    c.gates.push_back(parse_gate(gates[i], "gates[" + std::to_string(i) + "]"));
  }
  if (root.contains("system_gates")) {
    const json& sg = root.at("system_gates");
    if (!sg.is_array()) throw ParseError("system_gates", "expected an array");
    for (std::size_t i = 0; i < sg.size(); ++i) {
      c.system_gates.push_back(parse_gate(sg[i], "system_gates[" + std::to_string(i) + "]"));
    }
  }
  try {
    c.check();
  } catch (const std::exception& e) {
    throw ParseError("", std::string("inconsistent circuit: ") + e.what());
  }
  return c;
}

CollisionCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_circuit(ss.str());
}

bool circuits_equal(const CollisionCircuit& a, const CollisionCircuit& b) {
  if (!(a.layout == b.layout) || a.system_factors != b.system_factors ||
      !(a.params == b.params)) {
    return false;
  }
  if (a.targets.size() != b.targets.size() || a.ancillas.size() != b.ancillas.size() ||
      a.gates.size() != b.gates.size() || a.system_gates.size() != b.system_gates.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.targets.size(); ++i) {
    if (!same_local(a.targets[i], b.targets[i])) return false;
  }
  for (std::size_t i = 0; i < a.ancillas.size(); ++i) {
    const auto& x = a.ancillas[i];
    const auto& y = b.ancillas[i];
    if (x.id != y.id || x.c != y.c || x.label != y.label || x.couplings != y.couplings) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.gates.size(); ++i) {
    if (!same_gate(a.gates[i], b.gates[i])) return false;
  }
  for (std::size_t i = 0; i < a.system_gates.size(); ++i) {
    if (!same_gate(a.system_gates[i], b.system_gates[i])) return false;
  }
  return true;
}

}  // namespace mcm

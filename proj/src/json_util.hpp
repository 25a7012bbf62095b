#pragma once

// Shared JSON encodings for complex scalars and dense matrices.

#include <string>

#include "json.hpp"
#include "mcm/model_io.hpp"

namespace mcm::jsonio {

using json = nlohmann::ordered_json;

// A number, or [re, im].
inline Complex parse_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw ParseError(path, "expected a number or [re, im]");
}

inline json emit_complex(Complex z) {
  if (z.imag() == 0.0) return z.real();
  return json::array({z.real(), z.imag()});
}

// Square array of rows.
inline Matrix parse_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ParseError(path, "expected a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      throw ParseError(rp, "expected a row of " + std::to_string(n) + " entries");
    }
    for (Eigen::Index c = 0; c < n; ++c) {
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              rp + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

inline json emit_matrix(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(emit_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mcm::jsonio

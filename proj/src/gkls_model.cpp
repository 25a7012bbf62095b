#include "mcm/gkls_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace mcm {

Matrix LocalOperator::full(const TensorLayout& layout) const {
  return embed(matrix, sites, layout);
}

LocalOperator LocalOperator::extended_to(std::span<const std::size_t> superset,
                                         const TensorLayout& layout) const {
  std::vector<std::size_t> sub_dims;
  sub_dims.reserve(superset.size());
  for (std::size_t s : superset) sub_dims.push_back(layout.dim(s));
  std::vector<std::size_t> positions;
  for (std::size_t s : sites) {
    auto it = std::find(superset.begin(), superset.end(), s);
    if (it == superset.end()) {
      throw DimensionError("extended_to: site " + std::to_string(s) +
                           " missing from superset");
    }
    positions.push_back(static_cast<std::size_t>(it - superset.begin()));
  }
  return LocalOperator{
      std::vector<std::size_t>(superset.begin(), superset.end()),
      embed(matrix, positions, TensorLayout(std::move(sub_dims))), label};
}

LocalOperator LocalOperator::adjoint() const {
  return LocalOperator{sites, matrix.adjoint(), label.empty() ? "" : label + "^dag"};
}

void LocalOperator::check(const TensorLayout& layout) const {
  layout.check_sites(sites);
  if (!std::is_sorted(sites.begin(), sites.end())) {
    throw DimensionError("operator '" + label + "': sites must be sorted");
  }
  const auto n = static_cast<Eigen::Index>(layout.dim_of(sites));
  if (matrix.rows() != n || matrix.cols() != n) {
    throw DimensionError("operator '" + label + "' is " +
                         std::to_string(matrix.rows()) + "x" +
                         std::to_string(matrix.cols()) +
                         ", its sites span dimension " + std::to_string(n));
  }
}

std::vector<std::size_t> union_of_sites(std::span<const LocalOperator> ops) {
  std::vector<std::size_t> all;
  for (const auto& op : ops) all.insert(all.end(), op.sites.begin(), op.sites.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

std::vector<LocalOperator> GKLSModel::terms_of(std::size_t j) const {
  if (j < gks_terms.size() && !gks_terms[j].empty()) return gks_terms[j];
  return {gks_ops.at(j)};
}

bool ValidationReport::accepted() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InvariantCheck& c) { return c.passed; });
}

const InvariantCheck* ValidationReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return &c;
  }
  return nullptr;
}

ValidationReport validate(const GKLSModel& model, const Tolerances& tol) {
  ValidationReport report;
  auto add = [&](std::string name, bool ok, double residual, std::string detail = {}) {
    report.checks.push_back({std::move(name), ok, residual, std::move(detail)});
  };

  const auto D = static_cast<Eigen::Index>(model.layout.total_dim());
  const bool layout_ok = model.layout.size() > 0;
  add("layout_nonempty", layout_ok, 0.0);

  const bool h_shape = model.hamiltonian.rows() == D && model.hamiltonian.cols() == D;
  add("hamiltonian_shape", h_shape, 0.0,
      h_shape ? "" : "expected " + std::to_string(D) + "x" + std::to_string(D));
  if (h_shape) {
    const double r = max_abs(model.hamiltonian - model.hamiltonian.adjoint());
    add("hamiltonian_hermitian", r <= tol.hermitian, r);
  }

  bool ops_ok = true;
  std::string ops_detail;
  for (const auto& op : model.gks_ops) {
    try {
      op.check(model.layout);
    } catch (const DimensionError& e) {
      ops_ok = false;
      ops_detail = e.what();
      break;
    }
  }
  add("gks_operators_well_formed", ops_ok, 0.0, ops_detail);

  const auto J = static_cast<Eigen::Index>(model.gks_ops.size());
  const double max_ops = static_cast<double>(D) * static_cast<double>(D) - 1.0;
  add("operator_count", static_cast<double>(J) <= max_ops, static_cast<double>(J),
      "J=" + std::to_string(J));

  const bool k_shape = model.kossakowski.rows() == J && model.kossakowski.cols() == J;
  add("kossakowski_shape", k_shape, 0.0,
      k_shape ? "" : "expected " + std::to_string(J) + "x" + std::to_string(J));
  if (k_shape) {
    const double r = max_abs(model.kossakowski - model.kossakowski.adjoint());
    add("kossakowski_hermitian", r <= tol.hermitian, r);
    const double min_eig = J > 0 ? min_hermitian_eigenvalue(model.kossakowski) : 0.0;
    report.kossakowski_min_eigenvalue = min_eig;
    std::ostringstream os;
    os << "min eigenvalue " << min_eig;
    add("kossakowski_psd", min_eig >= -tol.psd, min_eig, os.str());
  }

  if (!model.gks_terms.empty() && ops_ok) {
    bool ok = model.gks_terms.size() == model.gks_ops.size();
    double worst = 0.0;
    for (std::size_t j = 0; ok && j < model.gks_ops.size(); ++j) {
      const auto& terms = model.gks_terms[j];
      if (terms.empty()) continue;
      Matrix sum = Matrix::Zero(D, D);
      try {
        for (const auto& t : terms) sum += t.full(model.layout);
      } catch (const DimensionError&) {
        ok = false;
        break;
      }
      worst = std::max(worst, max_abs(sum - model.gks_ops[j].full(model.layout)));
    }
    add("gks_terms_sum", ok && worst <= tol.hermitian, worst);
  }

  if (model.klocal) {
    bool ok = model.klocal->k >= 1;
    std::string detail;
    for (std::size_t t = 0; ok && t < model.klocal->terms.size(); ++t) {
      const auto& term = model.klocal->terms[t];
      if (term.sites.size() > model.klocal->k) {
        ok = false;
        detail = "term " + std::to_string(t) + " touches more than k sites";
        break;
      }
      for (std::size_t j : term.ops) {
        if (j >= model.gks_ops.size()) {
          ok = false;
          detail = "term " + std::to_string(t) + " references missing operator";
          break;
        }
        for (std::size_t s : model.gks_ops[j].sites) {
          if (std::find(term.sites.begin(), term.sites.end(), s) == term.sites.end()) {
            ok = false;
            detail = "operator " + std::to_string(j) + " leaves term " + std::to_string(t);
          }
        }
      }
    }
    add("klocal_terms", ok, 0.0, detail);
  }
  return report;
}

GKLSModel DiagonalModel::as_gkls() const {
  GKLSModel m;
  m.layout = layout;
  m.hamiltonian = hamiltonian;
  m.gks_ops = lindblad_ops;
  const auto n = static_cast<Eigen::Index>(rates.size());
  m.kossakowski = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m.kossakowski(k, k) = rates[k];
  m.gks_terms = components;
  return m;
}

DiagonalModel diagonalize(const GKLSModel& model, const Tolerances& tol) {
  auto report = validate(model, tol);
  if (!report.accepted()) {
    std::string what = "diagonalize: model failed validation (" + report.first_failure()->name + ")";
    throw ValidationError(what, std::move(report));
  }
  DiagonalModel dm;
  dm.layout = model.layout;
  dm.hamiltonian = model.hamiltonian;
  dm.klocal = model.klocal;
  const auto J = static_cast<Eigen::Index>(model.num_ops());
  if (J == 0) {
    dm.unitary_C = Matrix(0, 0);
    return dm;
  }

  const Matrix herm = 0.5 * (model.kossakowski + model.kossakowski.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
  // Eigen returns ascending eigenvalues; reverse to descending.
  dm.unitary_C = es.eigenvectors().rowwise().reverse();
  const Eigen::VectorXd values = es.eigenvalues().reverse();
  dm.spectrum.assign(values.data(), values.data() + values.size());

  const double floor = tol.rate_floor_relative * std::max(values(0), 0.0);
  for (Eigen::Index k = 0; k < J; ++k) {
    if (values(k) <= floor || values(k) <= 0.0) continue;
    const auto column = dm.unitary_C.col(k);
    const double col_max = column.cwiseAbs().maxCoeff();

    std::map<std::vector<std::size_t>, LocalOperator> by_support;
    for (Eigen::Index j = 0; j < J; ++j) {
      const Complex c = column(j);
      if (std::abs(c) <= 1e-13 * col_max) continue;
      for (const auto& term : model.terms_of(static_cast<std::size_t>(j))) {
        auto it = by_support.find(term.sites);
        if (it == by_support.end()) {
          by_support.emplace(term.sites,
                             LocalOperator{term.sites, c * term.matrix, ""});
        } else {
          it->second.matrix += c * term.matrix;
        }
      }
    }
    std::vector<LocalOperator> comps;
    for (auto& [sites, op] : by_support) {
      if (max_abs(op.matrix) <= 1e-14) continue;
      op.label = "L" + std::to_string(dm.rates.size()) + "@" + std::to_string(comps.size());
      comps.push_back(std::move(op));
    }
    const auto support = union_of_sites(comps);
    LocalOperator lk{support, Matrix::Zero(static_cast<Eigen::Index>(model.layout.dim_of(support)),
                                           static_cast<Eigen::Index>(model.layout.dim_of(support))),
                     "L" + std::to_string(dm.rates.size())};
    for (const auto& c : comps) lk.matrix += c.extended_to(support, model.layout).matrix;

    dm.lindblad_ops.push_back(std::move(lk));
    dm.components.push_back(std::move(comps));
    dm.rates.push_back(values(k));
  }
  return dm;
}

Matrix apply_liouvillian(const GKLSModel& model, const Matrix& rho) {
  const auto D = static_cast<Eigen::Index>(model.system_dim());
  if (rho.rows() != D || rho.cols() != D) {
    throw DimensionError("apply_liouvillian: rho is " + std::to_string(rho.rows()) +
                         "x" + std::to_string(rho.cols()) + ", system dimension is " +
                         std::to_string(D));
  }
  Matrix out = -kI * (model.hamiltonian * rho - rho * model.hamiltonian);
  std::vector<Matrix> full;
  full.reserve(model.gks_ops.size());
  for (const auto& op : model.gks_ops) full.push_back(op.full(model.layout));
  for (std::size_t j = 0; j < full.size(); ++j) {
    for (std::size_t k = 0; k < full.size(); ++k) {
      const Complex g = model.kossakowski(static_cast<Eigen::Index>(j),
                                          static_cast<Eigen::Index>(k));
      if (g == 0.0) continue;
      const Matrix fkdag_fj = full[k].adjoint() * full[j];
      out += g * (full[j] * rho * full[k].adjoint() -
                  0.5 * (fkdag_fj * rho + rho * fkdag_fj));
    }
  }
  return out;
}

std::uint64_t klocal_count(std::uint64_t M, std::uint64_t k) {
  if (k == 0 || k > M) {
    throw std::invalid_argument("klocal_count requires 1 <= k <= M (k=" +
                                std::to_string(k) + ", M=" + std::to_string(M) + ")");
  }
  k = std::min(k, M - k);
  std::uint64_t c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) c = c * (M - k + i) / i;
  return c;
}

double klocal_asymptote(std::uint64_t M, std::uint64_t k) {
  if (k == 0 || k > M) {
    throw std::invalid_argument("klocal_asymptote requires 1 <= k <= M");
  }
  const double kd = static_cast<double>(k);
  return std::pow(static_cast<double>(M), kd) /
         (std::tgamma(kd + 1.0) * std::exp(kd));
}

}  // namespace mcm

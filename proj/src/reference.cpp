#include "mcm/reference.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace mcm {

Superoperator vectorize_liouvillian(const GKLSModel& model, std::size_t dimension_cap) {
  const std::size_t D = model.system_dim();
  if (D * D > dimension_cap) {
    throw CapExceeded("Liouvillian dimension " + std::to_string(D * D) + " exceeds cap " +
                      std::to_string(dimension_cap));
  }
  const auto d = static_cast<Eigen::Index>(D);
  const Matrix id = Matrix::Identity(d, d);
  const Matrix& h = model.hamiltonian;
  Matrix l = Complex(0.0, -1.0) * (kron(id, h) - kron(h.transpose(), id));

  std::vector<Matrix> full;
  full.reserve(model.num_ops());
  for (const auto& op : model.gks_ops) full.push_back(op.full(model.layout));
  for (std::size_t j = 0; j < full.size(); ++j) {
    for (std::size_t k = 0; k < full.size(); ++k) {
      const Complex g = model.kossakowski(static_cast<Eigen::Index>(j),
                                          static_cast<Eigen::Index>(k));
      if (g == Complex(0.0, 0.0)) continue;
      const Matrix& fj = full[j];
      const Matrix& fk = full[k];
      const Matrix kj = fk.adjoint() * fj;
      l += g * (kron(fk.conjugate(), fj) - 0.5 * kron(id, kj) - 0.5 * kron(kj.transpose(), id));
    }
  }
  return {std::move(l), D};
}

Superoperator semigroup(const Superoperator& generator, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("semigroup: t must be >= 0");
  return {matrix_exp(Complex(t, 0.0) * generator.matrix), generator.dim};
}

Superoperator semigroup(const GKLSModel& model, double t, std::size_t dimension_cap) {
  return semigroup(vectorize_liouvillian(model, dimension_cap), t);
}

Matrix random_pure_state(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector psi(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    psi(i) = Complex(re, im);
  }
  psi.normalize();
  return psi * psi.adjoint();
}

namespace {

double deviation(const Matrix& diff_map, const Matrix& rho, std::size_t dim) {
  return trace_norm(unvec(diff_map * vec(rho), dim));
}

}  // namespace

double sampled_distance(const Superoperator& a, const Superoperator& b,
                        std::size_t samples, std::mt19937_64& rng) {
  if (a.dim != b.dim) throw DimensionError("sampled_distance: dimension mismatch");
  const Matrix diff = a.matrix - b.matrix;
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    worst = std::max(worst, deviation(diff, random_pure_state(a.dim, rng), a.dim));
  }
  return worst;
}

ErrorReport measure_errors(const CollisionCircuit& circuit, const GKLSModel& model,
                           std::size_t n, std::size_t samples, std::uint64_t seed,
                           const EngineOptions& options) {
  if (n == 0) throw std::invalid_argument("measure_errors: n must be >= 1");
  if (samples == 0) throw std::invalid_argument("measure_errors: samples must be >= 1");
  if (circuit.system_layout() != model.layout) {
    throw DimensionError("measure_errors: circuit and model system layouts differ");
  }
  const double dt = circuit.params.dt;
  const std::size_t D = model.system_dim();

  const Superoperator generator = vectorize_liouvillian(model, options.dimension_cap);
  const Superoperator exact_dt = semigroup(generator, dt);
  const Superoperator exact_t = semigroup(generator, dt * static_cast<double>(n));
  const Superoperator phi = CollisionEngine(circuit, options).extract_map();
  EngineOptions unsplit_options = options;
  unsplit_options.unsplit = true;
  const Superoperator phi_unsplit = CollisionEngine(circuit, unsplit_options).extract_map();
  const Superoperator phi_n = phi.power(n);

  const Matrix diff_g = exact_t.matrix - phi_n.matrix;
  const Matrix diff_s = exact_dt.matrix - phi.matrix;
  const Matrix diff_t = exact_dt.matrix - phi_unsplit.matrix;
  const Matrix diff_c = phi_unsplit.matrix - phi.matrix;

  ErrorReport report;
  report.n = n;
  report.dt = dt;
  report.t = dt * static_cast<double>(n);
  report.seed = seed;
  report.samples = samples;
  report.per_state.reserve(samples);
  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < samples; ++s) {
    const Matrix rho = random_pure_state(D, rng);
    const double g = deviation(diff_g, rho, D);
    report.per_state.push_back({s, g});
    report.eps_g_lower = std::max(report.eps_g_lower, g);
    report.eps_s_lower = std::max(report.eps_s_lower, deviation(diff_s, rho, D));
    report.eps_t_lower = std::max(report.eps_t_lower, deviation(diff_t, rho, D));
    report.eps_c_lower = std::max(report.eps_c_lower, deviation(diff_c, rho, D));
  }
  return report;
}

void write_error_csv(std::ostream& os, const ErrorReport& report) {
  os << std::setprecision(17);
  os << "# mcm-errors v1\n";
  os << "# seed=" << report.seed << " samples=" << report.samples << " n=" << report.n
     << " dt=" << report.dt << " t=" << report.t << '\n';
  os << "# sampled lower bounds: eps_g=" << report.eps_g_lower
     << " eps_s=" << report.eps_s_lower << " eps_t=" << report.eps_t_lower
     << " eps_c=" << report.eps_c_lower << '\n';
  os << "sample_index,trace_distance\n";
  for (const auto& s : report.per_state) os << s.sample_index << ',' << s.trace_distance << '\n';
}

}  // namespace mcm

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "mcm/reference.hpp"

namespace mcm {

/// Inputs of the analytical error bounds. Lambda and a_max are dimensionless
/// amplitudes; g_S, g_I and gamma are energies; dt is a time.
struct BoundInputs {
  double Lambda = 0.0;
  double Xi = 0.0;     // distinct elementary generators per step
  double K = 1.0;      // number of k-local terms
  double J = 0.0;      // GKS operators (per term in the k-local setting)
  double R = 1.0;      // generators per decomposed operator
  double g_S = 0.0;
  double g_I = 0.0;
  double gamma = 1.0;
  double dt = 0.0;
  double a_max = 0.0;

  /// Throws std::invalid_argument on negative entries.
  void check() const;
};

struct Prescriptions {
  bool truncation = false;   // 2 R Lambda (1 + J R Lambda) gamma dt < 1
  bool interaction = false;  // 4 Xi dt g_I Lambda < 1
  bool system = false;       // 2 dt K g_S Lambda < 1
  bool all() const { return truncation && interaction && system; }
};

Prescriptions prescriptions(const BoundInputs& in);

/// 2e (K R Lambda (1 + J R Lambda) gamma dt)^2.
double truncation_bound(const BoundInputs& in);
/// 2e (K (a_max + J a_max^2) gamma dt)^2.
double truncation_bound_amax(const BoundInputs& in);

double pol1(const BoundInputs& in);
double pol2(const BoundInputs& in);
/// pol1 dt^2 + pol2 dt^3.
double collision_bound(const BoundInputs& in);

/// pol1 + pol2 dt + 2e (K R Lambda (1 + J R Lambda) gamma)^2, at in.dt.
double f_of_M(const BoundInputs& in);

/// ceil(K J f t^2 / eps).
std::uint64_t ancilla_count(double K, double J, double f, double t, double eps_g);
/// ceil(((2R - 1) K J + N_G_S) f t^2 / eps).
std::uint64_t gate_count(double R, double K, double J, double N_G_S, double f, double t,
                         double eps_g);

struct ResourceReport {
  double K = 0.0;
  double J_k = 0.0;
  double R = 0.0;
  double N_G_S = 0.0;
  double f_M = 0.0;
  double t = 0.0;
  double eps_g = 0.0;
  std::uint64_t N_A = 0;
  std::uint64_t N_G = 0;
  double gates_per_step = 0.0;  // J (2R - 1) K + N_G_S
};

/// N_G_S is K when the system Hamiltonian is nonzero, otherwise 0.
ResourceReport resources(const BoundInputs& in, bool has_hamiltonian, double t, double eps_g);

/// Bound inputs read off a compiled circuit (K from the caller).
BoundInputs bound_inputs_from(const CollisionCircuit& circuit, double K = 1.0);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log-space residuals
  bool degenerate = false;
};

/// Least-squares line through (log x, log y). Flags a degenerate fit when
/// any y is not positive or fewer than two points are usable.
SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double zero_floor = 1e-13);

struct SweepRow {
  std::size_t n = 0;
  double dt = 0.0;
  double eps_g_lower = 0.0;
  double eps_s_lower = 0.0;
  double trunc_bound = 0.0;
  double coll_bound = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  SlopeFit fit;
  std::uint64_t seed = 0;
};

/// Builds a circuit for each dt = t / n and fits eps_g against n.
using CircuitFactory = std::function<CollisionCircuit(double dt)>;
SweepResult sweep_scaling(const GKLSModel& model, const CircuitFactory& factory, double t,
                          const std::vector<std::size_t>& n_values, std::size_t samples,
                          std::uint64_t seed, const EngineOptions& options = {});

/// CSV `n,dt,eps_g_lower,eps_s_lower,trunc_bound,coll_bound` with the fit
/// and seed as comment header.
void write_sweep_csv(std::ostream& os, const SweepResult& sweep);

}  // namespace mcm

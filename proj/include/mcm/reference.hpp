#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "mcm/engine.hpp"

namespace mcm {

/// Matrix of the generator acting on vec(rho):
///   -i(I (x) H - H^T (x) I)
///   + sum_jk gamma_jk [conj(F_k) (x) F_j - 1/2 I (x) F_k^dag F_j - 1/2 (F_k^dag F_j)^T (x) I].
Superoperator vectorize_liouvillian(const GKLSModel& model,
                                    std::size_t dimension_cap = kDefaultDimensionCap);

/// exp(t L). Throws std::invalid_argument for t < 0.
Superoperator semigroup(const GKLSModel& model, double t,
                        std::size_t dimension_cap = kDefaultDimensionCap);
Superoperator semigroup(const Superoperator& generator, double t);

/// Haar-random pure state |psi><psi| of dimension `dim`.
Matrix random_pure_state(std::size_t dim, std::mt19937_64& rng);

struct SampleError {
  std::size_t sample_index = 0;
  double trace_distance = 0.0;  // || (exp(L t) - phi^n)[rho] ||_1
};

/// Sampled lower bounds on induced 1->1 norm errors. Every value is a
/// maximum over random pure states, so never exceeds the true norm.
struct ErrorReport {
  double eps_g_lower = 0.0;  // || exp(L t) - phi^n ||
  double eps_s_lower = 0.0;  // || exp(L dt) - phi ||
  double eps_t_lower = 0.0;  // || exp(L dt) - phi_unsplit ||
  double eps_c_lower = 0.0;  // || phi_unsplit - phi ||
  std::vector<SampleError> per_state;  // global error per sample
  std::size_t n = 0;
  double dt = 0.0;
  double t = 0.0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
};

ErrorReport measure_errors(const CollisionCircuit& circuit, const GKLSModel& model,
                           std::size_t n, std::size_t samples, std::uint64_t seed,
                           const EngineOptions& options = {});

/// Largest trace-norm deviation between two maps over random pure states.
double sampled_distance(const Superoperator& a, const Superoperator& b,
                        std::size_t samples, std::mt19937_64& rng);

/// CSV `sample_index,trace_distance` preceded by a commented summary.
void write_error_csv(std::ostream& os, const ErrorReport& report);

}  // namespace mcm

#pragma once

#include <cstddef>

namespace mcm {

/// Numerical thresholds shared by every module. Defaults match the
/// documented contracts; callers override individual fields as needed.
struct Tolerances {
  double hermitian = 1e-10;      // max-abs |A - A^dagger|
  double unitary = 1e-10;        // max-abs |U^dagger U - I|
  double psd = 1e-10;            // smallest admissible eigenvalue is -psd
  double kossakowski_reconstruction = 1e-9;
  double rate_floor_relative = 1e-12;  // Gamma_k < floor * max(Gamma) is zero
  double span_residual = 1e-9;   // many-body decomposition residual
  double density_trace = 1e-8;   // input density operators
  double channel_trace = 1e-9;
  double choi_psd = 1e-9;
  double gs_over_gi_warning = 0.1;
  double gamma_dt_warning = 0.05;
};

inline const Tolerances& default_tolerances() {
  static const Tolerances tol{};
  return tol;
}

/// Largest joint Hilbert-space dimension any dense routine will build.
inline constexpr std::size_t kDefaultDimensionCap = 4096;

}  // namespace mcm

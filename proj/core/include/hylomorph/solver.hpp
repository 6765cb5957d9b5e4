#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hylomorph/functionals.hpp"

namespace hylo {

struct SolverOptions {
  double sigma = 1.0;  // target hylenic charge |C|
  double step = 0.5;   // initial step of the preconditioned descent
  double tol = 1e-6;   // relative stationary residual
  int max_iter = 50000;
  int restarts = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// A point of Gamma_sigma as found by the descent.
///
/// For NKG `profile` is psi_0 and `profile_dot` is -i omega psi_0; with
/// omega = sigma / rho > 0 the signed charge is -sigma.
struct SolitonResult {
  Field profile;
  std::optional<Field> profile_dot;
  double omega = 0.0;
  double energy = 0.0;
  double charge = 0.0;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t start = 0;  // index of the winning restart

  NkgState nkg_state() const;
};

/// Gaussian bump of standard deviation half a cell centred in `cell`,
/// scaled so that integral |u|^2 = charge.
Field gaussian_bump(const Grid& grid, const Index& cell, double charge);

/// Projected descent on {integral |u|^2 = sigma}: preconditioned gradient
/// step tangent to the constraint, then rescale. Best energy over the
/// restarts wins; the start cells are drawn deterministically from `seed`.
/// With `initial`, a single descent starts from it instead.
SolitonResult minimize_nls(const NlsModel& model, const SolverOptions& opts,
                           const std::optional<Field>& initial = std::nullopt);

/// Reduced NKG problem: psi_dot = -i omega psi eliminated, minimizing
/// E_red(psi) = sigma^2 / (2 rho) + integral(|grad psi|^2 / 2 + W(x, psi))
/// with rho = integral |psi|^2 and omega = sigma / rho.
SolitonResult minimize_nkg(const NkgModel& model, const SolverOptions& opts,
                           const std::optional<Field>& initial = std::nullopt);

double nkg_reduced_energy(const NkgModel& model, const Field& psi, double sigma);

/// ||grad_E - omega grad_C|| / ||grad_E|| for NLS.
double nls_stationary_residual(const NlsModel& model, const Field& u, double omega);
/// ||-Lap psi + W'(x, psi) - omega^2 psi|| / ||omega^2 psi||.
double nkg_stationary_residual(const NkgModel& model, const Field& psi, double omega);

struct SweepRow {
  double sigma = 0.0;
  double lambda_upper = 0.0;
  double energy = 0.0;
  double omega = 0.0;
  bool converged = false;
  bool existence_flag = false;
  // sigma * lambda_upper grew relative to the previous row.
  bool sigma_lambda_increasing = false;
};

struct SweepTable {
  double e0_rayleigh = 0.0;
  std::vector<SweepRow> rows;
  std::vector<SolitonResult> results;
};

/// One minimization per sigma, each warm-started from the previous profile.
/// existence_flag marks Lambda below e0_rayleigh by more than 1e-9 relative.
SweepTable sigma_sweep(const NlsModel& model, std::span<const double> sigmas, const SolverOptions& opts);
SweepTable sigma_sweep(const NkgModel& model, std::span<const double> sigmas, const SolverOptions& opts);

}  // namespace hylo

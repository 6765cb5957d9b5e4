#pragma once

#include <functional>
#include <span>
#include <vector>

#include "hylomorph/functionals.hpp"

namespace hylo {

/// alpha^2 = inf_s 2 W(s) / s^2 (NLS) or inf_s sup_x 2 W(x,s) / s^2 (NKG),
/// together with the amplitude where the infimum is attained.
struct AlphaEstimate {
  double alpha = 0.0;
  double minimizing_amplitude = 0.0;
};

/// Dense log-spaced scan on [1e-6, s_max] refined by golden-section search.
/// `h_sup_squared` is h^2 (NLS) or max_x h(x)^2 (NKG).
AlphaEstimate compute_alpha(const Nonlinearity& w, double h_sup_squared);
double compute_alpha(const NlsModel& model);
double compute_alpha(const NkgModel& model);

struct RayleighOptions {
  double tol = 1e-10;
  int max_iter = 20000;
};

struct E0Estimate {
  double lower = 0.0;
  double upper = 0.0;
  double rayleigh = 0.0;
  int iterations = 0;
};

/// Small-field energy/charge rate of one lattice cell with periodic boundary
/// conditions. NLS: lowest eigenvalue of -Lap/2 + h^2/2 + V, bracketed by
/// [h^2/2, h^2/2 + ||V||_inf]. NKG: with the optimal psi_dot the quotient
/// reduces to sqrt(lowest eigenvalue of -Lap + h(x)^2), bounded below by h0.
/// Throws ConvergenceError when the quotient descent stalls.
E0Estimate estimate_e0(const NlsModel& model, const RayleighOptions& opts = {});
E0Estimate estimate_e0(const NkgModel& model, const RayleighOptions& opts = {});

/// Radial plateau of height `amplitude` out to `radius`, linear ramp to zero
/// at radius + 1.
double plateau_ramp(double radius, double amplitude, double r) noexcept;

struct PlateauScan {
  std::vector<double> radii;       // empty: spread up to the box limit
  std::vector<double> amplitudes;  // empty: around the alpha minimizer
};

struct LambdaStarBound {
  double value = 0.0;
  double radius = 0.0;
  double amplitude = 0.0;
};

/// min of Lambda over plateau profiles centred in the box (NKG uses
/// psi_dot = -i alpha psi). Throws std::invalid_argument when a requested
/// radius + 1 exceeds the inscribed radius of the box.
LambdaStarBound lambda_star_upper(const NlsModel& model, const PlateauScan& scan = {});
LambdaStarBound lambda_star_upper(const NkgModel& model, const PlateauScan& scan = {});

struct HylomorphyReport {
  double alpha = 0.0;
  double e0_lower = 0.0;
  double e0_upper = 0.0;
  double e0_rayleigh = 0.0;
  double lambda_star_upper = 0.0;  // NaN when the box cannot hold a plateau
  double margin = 0.0;
  bool passes = false;
};

/// NLS margin h^2/2 - alpha^2/2 - ||V||_inf, NKG margin h0 - alpha.
HylomorphyReport check_hylomorphy(const NlsModel& model);
HylomorphyReport check_hylomorphy(const NkgModel& model);

struct BestCell {
  Index cell{};
  std::size_t linear = 0;
  double ratio = 0.0;
  double aggregate = 0.0;  // sum E_j / sum C_j over the eligible cells
  std::size_t eligible = 0;
};

/// Cell minimizing E_j / C_j among cells whose charge has the sign of the
/// total charge (positive for NLS). Throws std::domain_error when none has.
BestCell best_cell(const NlsModel& model, const Field& u);
BestCell best_cell(const NkgModel& model, const NkgState& u);
BestCell best_cell(const Grid& grid, std::span<const double> energy_density,
                   std::span<const double> charge_density);

struct SplittingDefect {
  double energy = 0.0;
  double charge = 0.0;
};

SplittingDefect splitting_defect(const NlsModel& model, const Field& u, const Field& w);
SplittingDefect splitting_defect(const NkgModel& model, const NkgState& u, const NkgState& w);

/// Analytic profile of the displacement from the box centre.
using Profile = std::function<Complex(const Point& displacement)>;

Field sample_profile(const Grid& grid, const Profile& profile);

struct DilationRow {
  double theta = 0.0;
  double energy = 0.0;
  double charge = 0.0;
  double lambda = 0.0;
};

/// Evaluates E, C, Lambda on u(theta x) for each theta (profile re-evaluated,
/// never resampled). Throws std::invalid_argument for theta <= 0.
std::vector<DilationRow> dilation_scan(const NlsModel& model, const Profile& profile,
                                       std::span<const double> thetas);

}  // namespace hylo

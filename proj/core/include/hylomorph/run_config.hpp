#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hylomorph/config.hpp"
#include "hylomorph/dynamics.hpp"
#include "hylomorph/functionals.hpp"
#include "hylomorph/solver.hpp"

namespace hylo {

enum class ModelType { Nls, Nkg };

/// Validated view of a run configuration. Keys:
///
///   [model]  type = "nls"|"nkg", h, mass_amplitude, nonlinearity, a, b,
///            potential = "none"|"cosine", v0, lattice (row-major d*d)
///   [grid]   dim, cells, points_per_cell (scalar or one per direction)
///   [solver] sigma, sigmas, step, tol, max_iter, restarts, seed
///   [evolve] dt, steps, stride, snapshot_stride, delta, horizon, seed, input
///   [output] directory, formats
struct RunConfig {
  ModelType type = ModelType::Nls;
  double h = 1.0;
  double mass_amplitude = 0.0;
  std::string nonlinearity = "quartic_sextic";
  double a = 0.0;
  double b = 0.0;
  std::string potential = "none";
  double v0 = 0.0;
  int dim = 1;
  std::vector<double> lattice;
  std::vector<std::int64_t> cells;
  std::vector<std::int64_t> points_per_cell;

  std::optional<double> sigma;
  std::vector<double> sigmas;
  double step = 0.5;
  double tol = 1e-6;
  int max_iter = 50000;
  int restarts = 1;
  std::uint64_t seed = 0;

  std::optional<double> dt;
  std::optional<std::int64_t> steps;
  std::int64_t stride = 100;
  std::int64_t snapshot_stride = 0;
  double delta = 1e-2;
  std::optional<double> horizon;
  std::uint64_t noise_seed = 0;
  std::optional<std::string> input;

  std::string directory = ".";
  std::vector<std::string> formats{"json", "csv", "snapshot"};

  /// Checks keys and ranges for `command`; throws ConfigError naming the
  /// first offending key. Unknown keys are rejected.
  static RunConfig from_config(const Config& config, const std::string& command);
  /// Every setting made explicit; parsing it again gives the same run.
  Config to_config() const;

  bool wants(const std::string& format) const;

  Grid grid() const;
  Nonlinearity make_nonlinearity() const;
  NlsModel nls_model(const Grid& grid) const;
  NkgModel nkg_model(const Grid& grid) const;
  SolverOptions solver_options() const;
  EvolveOptions evolve_options() const;
  StabilityOptions stability_options() const;
};

}  // namespace hylo

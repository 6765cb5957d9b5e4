#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "hylomorph/dynamics.hpp"
#include "hylomorph/functionals.hpp"
#include "hylomorph/lattice.hpp"

namespace fixtures {

inline hylo::Grid line_grid(std::int64_t cells, std::int64_t points, double cell_length = 2.0) {
  const std::array<std::int64_t, 1> m{cells};
  const std::array<std::int64_t, 1> n{points};
  return hylo::Grid::build(hylo::LatticeSpec::scaled_identity(1, cell_length), m, n);
}

inline hylo::Grid plane_grid(std::int64_t cells, std::int64_t points, double cell_length = 1.0) {
  const std::array<std::int64_t, 2> m{cells, cells};
  const std::array<std::int64_t, 2> n{points, points};
  return hylo::Grid::build(hylo::LatticeSpec::scaled_identity(2, cell_length), m, n);
}

inline hylo::Nonlinearity reference_w() { return hylo::Nonlinearity::quartic_sextic(1.0, 1.0, 0.25); }

// 16 cells of length 2, 64 points per cell.
inline hylo::NlsModel reference_nls(double v0 = 0.1) {
  return hylo::NlsModel(line_grid(16, 64), hylo::Potential::cosine(v0), reference_w());
}

inline hylo::NkgModel reference_nkg(double mass_amplitude = 0.1) {
  return hylo::NkgModel(line_grid(16, 64), reference_w(), mass_amplitude);
}

// Smooth random field: band-limited noise scaled to the given L2 norm.
inline hylo::Field smooth_field(const hylo::Grid& grid, std::uint64_t seed, double norm = 1.0) {
  hylo::Field f = hylo::band_limited_noise(grid, seed);
  for (auto& v : f.values) v *= norm;
  return f;
}

inline std::string config_path(const std::string& name) {
  return std::string(HYLOMORPH_TEST_CONFIG_DIR) + "/" + name;
}

}  // namespace fixtures

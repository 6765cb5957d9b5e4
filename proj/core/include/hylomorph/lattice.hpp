#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hylo {

inline constexpr int kMaxDim = 3;

using Complex = std::complex<double>;
using Point = std::array<double, kMaxDim>;
using Index = std::array<std::int64_t, kMaxDim>;

class SpectralOps;

/// Invertible d x d cell map A. Cells are Q = A Q0 with Q0 = [0,1)^d and the
/// lattice translations act as (T_z u)(x) = u(x + A z).
class LatticeSpec {
 public:
  /// `row_major` holds d*d entries. Throws std::invalid_argument when d is
  /// outside {1,2,3} or A is numerically singular.
  static LatticeSpec create(int dim, std::span<const double> row_major);
  static LatticeSpec scaled_identity(int dim, double scale = 1.0);

  int dim() const noexcept { return dim_; }
  double at(int row, int col) const noexcept { return a_[row * kMaxDim + col]; }
  double inverse_at(int row, int col) const noexcept { return inv_[row * kMaxDim + col]; }
  double determinant() const noexcept { return det_; }
  double cell_volume() const noexcept;
  std::vector<double> row_major() const;

  Point apply(const Point& q) const noexcept;  // A q
  Point solve(const Point& x) const noexcept;  // A^{-1} x

  bool operator==(const LatticeSpec& other) const noexcept;

 private:
  int dim_ = 1;
  std::array<double, kMaxDim * kMaxDim> a_{};
  std::array<double, kMaxDim * kMaxDim> inv_{};
  double det_ = 1.0;
};

/// x = q + A j with j = floor(A^{-1} x) and q in the reference cell Q.
struct CellDecomposition {
  Index cell{};
  Point offset{};
};

CellDecomposition cell_of(const LatticeSpec& lattice, const Point& x);

/// Periodic tensor-product grid over m_1 x ... x m_d whole cells with n_i
/// points per cell per direction. Points sit at x = A(g/n), g integer,
/// so every point belongs to exactly one cell. Copies share the immutable
/// geometry and FFT plans.
class Grid {
 public:
  static Grid build(const LatticeSpec& lattice, std::span<const std::int64_t> cells,
                    std::span<const std::int64_t> points_per_cell);

  const LatticeSpec& lattice() const noexcept;
  int dim() const noexcept;
  const Index& cells() const noexcept;
  const Index& points_per_cell() const noexcept;
  // Points per direction, m_i * n_i (1 for unused directions).
  const Index& shape() const noexcept;
  std::size_t size() const noexcept;
  std::size_t num_cells() const noexcept;
  double weight() const noexcept;
  double box_volume() const noexcept;

  Index unravel(std::size_t point) const noexcept;
  // Wraps every component periodically before flattening.
  std::size_t ravel(const Index& g) const noexcept;
  Point lattice_coords(std::size_t point) const noexcept;
  Point position(std::size_t point) const noexcept;
  Index cell_of_point(std::size_t point) const noexcept;
  std::size_t cell_linear(const Index& cell) const noexcept;
  Index cell_unravel(std::size_t cell) const noexcept;

  Point box_center() const noexcept;
  // Physical displacement x - c using the lattice-coordinate minimum image.
  Point displacement(std::size_t point, const Point& center) const noexcept;
  // Radius of the largest ball that fits inside the periodic box.
  double inscribed_radius() const noexcept;

  const SpectralOps& spectral() const noexcept;

  // Same lattice and sizes; the same geometry in every numeric respect.
  bool compatible(const Grid& other) const noexcept;

 private:
  struct Data;
  std::shared_ptr<const Data> data_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// Complex samples on a grid.
struct Field {
  Grid grid;
  std::vector<Complex> values;

  static Field zeros(const Grid& grid);
  Field(Grid g, std::vector<Complex> v);

  std::size_t size() const noexcept { return values.size(); }
  bool all_finite() const noexcept;
};

/// (psi, psi_dot) pair for the Klein-Gordon phase space.
struct NkgState {
  Field psi;
  Field psi_dot;

  NkgState(Field p, Field pd);
  const Grid& grid() const noexcept { return psi.grid; }
};

/// Real L2 pairing weight * sum Re(a conj(b)).
double real_inner(const Field& a, const Field& b);
double real_inner(const NkgState& a, const NkgState& b);
double l2_norm(const Field& a);

/// (T_z u)(x) = u(x + A z).
Field translate(const Field& u, const Index& z);
NkgState translate(const NkgState& u, const Index& z);

/// Per-cell totals weight * sum_{points in cell} density, indexed by
/// Grid::cell_linear.
std::vector<double> cell_sums(const Grid& grid, std::span<const double> density);

}  // namespace hylo

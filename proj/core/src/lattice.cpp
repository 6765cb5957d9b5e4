#include "hylomorph/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "hylomorph/errors.hpp"
#include "hylomorph/spectral.hpp"

namespace hylo {

namespace {

double det3(const std::array<double, 9>& m) {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

std::int64_t wrap(std::int64_t g, std::int64_t n) {
  const std::int64_t r = g % n;
  return r < 0 ? r + n : r;
}

}  // namespace

LatticeSpec LatticeSpec::create(int dim, std::span<const double> row_major) {
  if (dim < 1 || dim > kMaxDim) {
    throw std::invalid_argument("lattice dimension must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (row_major.size() != static_cast<std::size_t>(dim * dim)) {
    throw std::invalid_argument("lattice matrix needs " + std::to_string(dim * dim) +
                                " entries, got " + std::to_string(row_major.size()));
  }
  LatticeSpec spec;
  spec.dim_ = dim;
  // Unused directions are padded with the identity so 3x3 formulas apply.
  spec.a_ = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  double norm2 = 0.0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      const double v = row_major[r * dim + c];
      if (!std::isfinite(v)) throw std::invalid_argument("lattice matrix has a non-finite entry");
      spec.a_[r * kMaxDim + c] = v;
      norm2 += v * v;
    }
  }
  spec.det_ = det3(spec.a_);
  const double scale = std::pow(std::sqrt(norm2), dim);
  if (!(std::abs(spec.det_) > 1e-12 * scale)) {
    throw std::invalid_argument("lattice matrix is not invertible (det = " +
                                std::to_string(spec.det_) + ")");
  }
  const auto& m = spec.a_;
  const double inv_det = 1.0 / spec.det_;
  spec.inv_ = {(m[4] * m[8] - m[5] * m[7]) * inv_det, (m[2] * m[7] - m[1] * m[8]) * inv_det,
               (m[1] * m[5] - m[2] * m[4]) * inv_det, (m[5] * m[6] - m[3] * m[8]) * inv_det,
               (m[0] * m[8] - m[2] * m[6]) * inv_det, (m[2] * m[3] - m[0] * m[5]) * inv_det,
               (m[3] * m[7] - m[4] * m[6]) * inv_det, (m[1] * m[6] - m[0] * m[7]) * inv_det,
               (m[0] * m[4] - m[1] * m[3]) * inv_det};
  return spec;
}

LatticeSpec LatticeSpec::scaled_identity(int dim, double scale) {
  std::vector<double> a(static_cast<std::size_t>(dim * dim), 0.0);
  for (int i = 0; i < dim; ++i) a[i * dim + i] = scale;
  return create(dim, a);
}

double LatticeSpec::cell_volume() const noexcept { return std::abs(det_); }

std::vector<double> LatticeSpec::row_major() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(dim_ * dim_));
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) out.push_back(at(r, c));
  }
  return out;
}

Point LatticeSpec::apply(const Point& q) const noexcept {
  Point x{};
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) x[r] += at(r, c) * q[c];
  }
  return x;
}

Point LatticeSpec::solve(const Point& x) const noexcept {
  Point q{};
  for (int r = 0; r < dim_; ++r) {
    for (int c = 0; c < dim_; ++c) q[r] += inverse_at(r, c) * x[c];
  }
  return q;
}

bool LatticeSpec::operator==(const LatticeSpec& other) const noexcept {
  return dim_ == other.dim_ && a_ == other.a_;
}

CellDecomposition cell_of(const LatticeSpec& lattice, const Point& x) {
  for (int i = 0; i < lattice.dim(); ++i) {
    if (!std::isfinite(x[i])) throw std::invalid_argument("cell_of: non-finite coordinate");
  }
  const Point q = lattice.solve(x);
  CellDecomposition out;
  Point j{};
  for (int i = 0; i < lattice.dim(); ++i) {
    out.cell[i] = static_cast<std::int64_t>(std::floor(q[i]));
    j[i] = static_cast<double>(out.cell[i]);
  }
  const Point aj = lattice.apply(j);
  for (int i = 0; i < lattice.dim(); ++i) out.offset[i] = x[i] - aj[i];
  return out;
}

struct Grid::Data {
  LatticeSpec lattice;
  Index cells{1, 1, 1};
  Index per_cell{1, 1, 1};
  Index shape{1, 1, 1};
  std::size_t size = 1;
  std::size_t num_cells = 1;
  double weight = 1.0;
  std::unique_ptr<SpectralOps> spectral;
  explicit Data(LatticeSpec l) : lattice(std::move(l)) {}
};

Grid Grid::build(const LatticeSpec& lattice, std::span<const std::int64_t> cells,
                 std::span<const std::int64_t> points_per_cell) {
  const int d = lattice.dim();
  if (cells.size() != static_cast<std::size_t>(d) ||
      points_per_cell.size() != static_cast<std::size_t>(d)) {
    throw std::invalid_argument("grid sizes must have one entry per lattice dimension");
  }
  auto data = std::make_shared<Data>(lattice);
  double per_cell_points = 1.0;
  for (int i = 0; i < d; ++i) {
    if (cells[i] < 1) throw std::invalid_argument("cells_per_dim entries must be >= 1");
    if (points_per_cell[i] < 2) throw std::invalid_argument("points_per_cell entries must be >= 2");
    data->cells[i] = cells[i];
    data->per_cell[i] = points_per_cell[i];
    data->shape[i] = cells[i] * points_per_cell[i];
    data->size *= static_cast<std::size_t>(data->shape[i]);
    data->num_cells *= static_cast<std::size_t>(cells[i]);
    per_cell_points *= static_cast<double>(points_per_cell[i]);
  }
  data->weight = lattice.cell_volume() / per_cell_points;
  data->spectral = std::make_unique<SpectralOps>(data->shape, d, lattice, data->cells);
  Grid g;
  g.data_ = std::move(data);
  return g;
}

const LatticeSpec& Grid::lattice() const noexcept { return data_->lattice; }
int Grid::dim() const noexcept { return data_->lattice.dim(); }
const Index& Grid::cells() const noexcept { return data_->cells; }
const Index& Grid::points_per_cell() const noexcept { return data_->per_cell; }
const Index& Grid::shape() const noexcept { return data_->shape; }
std::size_t Grid::size() const noexcept { return data_->size; }
std::size_t Grid::num_cells() const noexcept { return data_->num_cells; }
double Grid::weight() const noexcept { return data_->weight; }
double Grid::box_volume() const noexcept {
  return data_->weight * static_cast<double>(data_->size);
}
const SpectralOps& Grid::spectral() const noexcept { return *data_->spectral; }

Index Grid::unravel(std::size_t point) const noexcept {
  const Index& s = data_->shape;
  Index g{};
  auto p = static_cast<std::int64_t>(point);
  for (int i = kMaxDim - 1; i >= 0; --i) {
    g[i] = p % s[i];
    p /= s[i];
  }
  return g;
}

std::size_t Grid::ravel(const Index& g) const noexcept {
  const Index& s = data_->shape;
  std::int64_t p = 0;
  for (int i = 0; i < kMaxDim; ++i) p = p * s[i] + wrap(g[i], s[i]);
  return static_cast<std::size_t>(p);
}

Point Grid::lattice_coords(std::size_t point) const noexcept {
  const Index g = unravel(point);
  Point q{};
  for (int i = 0; i < dim(); ++i) {
    q[i] = static_cast<double>(g[i]) / static_cast<double>(data_->per_cell[i]);
  }
  return q;
}

Point Grid::position(std::size_t point) const noexcept {
  return data_->lattice.apply(lattice_coords(point));
}

Index Grid::cell_of_point(std::size_t point) const noexcept {
  Index g = unravel(point);
  Index j{};
  for (int i = 0; i < dim(); ++i) j[i] = g[i] / data_->per_cell[i];
  return j;
}

std::size_t Grid::cell_linear(const Index& cell) const noexcept {
  const Index& m = data_->cells;
  std::int64_t p = 0;
  for (int i = 0; i < kMaxDim; ++i) p = p * m[i] + wrap(cell[i], m[i]);
  return static_cast<std::size_t>(p);
}

Index Grid::cell_unravel(std::size_t cell) const noexcept {
  const Index& m = data_->cells;
  Index j{};
  auto p = static_cast<std::int64_t>(cell);
  for (int i = kMaxDim - 1; i >= 0; --i) {
    j[i] = p % m[i];
    p /= m[i];
  }
  return j;
}

Point Grid::box_center() const noexcept {
  Point q{};
  for (int i = 0; i < dim(); ++i) q[i] = 0.5 * static_cast<double>(data_->cells[i]);
  return data_->lattice.apply(q);
}

Point Grid::displacement(std::size_t point, const Point& center) const noexcept {
  const Point q = lattice_coords(point);
  const Point qc = data_->lattice.solve(center);
  Point dq{};
  for (int i = 0; i < dim(); ++i) {
    const double m = static_cast<double>(data_->cells[i]);
    double v = q[i] - qc[i];
    v -= m * std::floor(v / m + 0.5);
    dq[i] = v;
  }
  return data_->lattice.apply(dq);
}

double Grid::inscribed_radius() const noexcept {
  double r = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) {
    double row2 = 0.0;
    for (int c = 0; c < dim(); ++c) row2 += lattice().inverse_at(i, c) * lattice().inverse_at(i, c);
    r = std::min(r, 0.5 * static_cast<double>(data_->cells[i]) / std::sqrt(row2));
  }
  return r;
}

bool Grid::compatible(const Grid& other) const noexcept {
  if (data_ == other.data_) return true;
  return data_->lattice == other.data_->lattice && data_->cells == other.data_->cells &&
         data_->per_cell == other.data_->per_cell;
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!a.compatible(b)) throw GridMismatch(std::string(where) + ": grids differ");
}

Field Field::zeros(const Grid& grid) { return Field(grid, std::vector<Complex>(grid.size())); }

Field::Field(Grid g, std::vector<Complex> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("field has " + std::to_string(values.size()) +
                                " values for a grid of " + std::to_string(grid.size()) + " points");
  }
}

bool Field::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](const Complex& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

NkgState::NkgState(Field p, Field pd) : psi(std::move(p)), psi_dot(std::move(pd)) {
  require_same_grid(psi.grid, psi_dot.grid, "NkgState");
}

double real_inner(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "real_inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    s += a.values[i].real() * b.values[i].real() + a.values[i].imag() * b.values[i].imag();
  }
  return a.grid.weight() * s;
}

double real_inner(const NkgState& a, const NkgState& b) {
  return real_inner(a.psi, b.psi) + real_inner(a.psi_dot, b.psi_dot);
}

double l2_norm(const Field& a) { return std::sqrt(real_inner(a, a)); }

Field translate(const Field& u, const Index& z) {
  const Grid& grid = u.grid;
  Index shift{};
  for (int i = 0; i < grid.dim(); ++i) shift[i] = z[i] * grid.points_per_cell()[i];
  std::vector<Complex> out(u.values.size());
  for (std::size_t p = 0; p < out.size(); ++p) {
    Index g = grid.unravel(p);
    for (int i = 0; i < grid.dim(); ++i) g[i] += shift[i];
    out[p] = u.values[grid.ravel(g)];
  }
  return Field(grid, std::move(out));
}

NkgState translate(const NkgState& u, const Index& z) {
  return NkgState(translate(u.psi, z), translate(u.psi_dot, z));
}

std::vector<double> cell_sums(const Grid& grid, std::span<const double> density) {
  if (density.size() != grid.size()) {
    throw std::invalid_argument("cell_sums: density length does not match the grid");
  }
  std::vector<double> totals(grid.num_cells(), 0.0);
  for (std::size_t p = 0; p < density.size(); ++p) {
    totals[grid.cell_linear(grid.cell_of_point(p))] += density[p];
  }
  for (double& t : totals) t *= grid.weight();
  return totals;
}

}  // namespace hylo

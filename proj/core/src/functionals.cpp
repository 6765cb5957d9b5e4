#include "hylomorph/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hylomorph/errors.hpp"
#include "hylomorph/spectral.hpp"

namespace hylo {

namespace {

double cosine_product(const Grid& grid, std::size_t p) {
  const Point q = grid.lattice_coords(p);
  double prod = 1.0;
  for (int i = 0; i < grid.dim(); ++i) prod *= 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * q[i]));
  return prod;
}

double sum_times_weight(const Grid& grid, const std::vector<double>& density) {
  double s = 0.0;
  for (double d : density) s += d;
  return grid.weight() * s;
}

void require_finite(const Field& u, const char* where) {
  if (!u.all_finite()) throw std::invalid_argument(std::string(where) + ": field has non-finite values");
}

}  // namespace

Nonlinearity Nonlinearity::quadratic(double h) {
  if (!(h >= 0.0) || !std::isfinite(h)) throw std::invalid_argument("nonlinearity: h must be >= 0");
  Nonlinearity n;
  n.family_ = NonlinearityFamily::Quadratic;
  n.h_ = h;
  return n;
}

Nonlinearity Nonlinearity::quartic_sextic(double h, double a, double b) {
  if (!(h > 0.0 && a > 0.0 && b > 0.0) || !std::isfinite(h * a * b)) {
    throw std::invalid_argument("quartic_sextic nonlinearity needs h, a, b > 0");
  }
  // min over s of 2W/s^2 is h^2 - 3a^2/(16b); the tolerance admits the
  // boundary case W(s*) = 0 up to roundoff.
  const double min_ratio = h * h - 3.0 * a * a / (16.0 * b);
  if (min_ratio < -1e-12 * h * h) {
    throw std::invalid_argument("quartic_sextic nonlinearity is not positive: need b >= 3a^2/(16h^2)");
  }
  Nonlinearity n;
  n.family_ = NonlinearityFamily::QuarticSextic;
  n.h_ = h;
  n.a_ = a;
  n.b_ = b;
  // Independent numerical scan of W >= 0.
  for (int k = 0; k <= 4000; ++k) {
    const double s = 1e-3 * std::pow(1e7, k / 4000.0) * std::max(1.0, n.root_scale());
    if (n.value(s) < -1e-12 * s * s * h * h) {
      throw std::invalid_argument("quartic_sextic nonlinearity is negative at s = " + std::to_string(s));
    }
  }
  return n;
}

std::string Nonlinearity::family_name() const {
  return family_ == NonlinearityFamily::Quadratic ? "quadratic" : "quartic_sextic";
}

double Nonlinearity::value(double s) const noexcept {
  return 0.5 * h_ * h_ * s * s + higher_order(s);
}

double Nonlinearity::higher_order(double s) const noexcept {
  if (family_ == NonlinearityFamily::Quadratic) return 0.0;
  const double s2 = s * s;
  return s2 * s2 * (-0.25 * a_ + (b_ / 6.0) * s2);
}

double Nonlinearity::derivative_over_s(double s) const noexcept {
  return h_ * h_ + higher_order_derivative_over_s(s);
}

double Nonlinearity::higher_order_derivative_over_s(double s) const noexcept {
  if (family_ == NonlinearityFamily::Quadratic) return 0.0;
  const double s2 = s * s;
  return s2 * (-a_ + b_ * s2);
}

double Nonlinearity::root_scale() const noexcept {
  if (family_ == NonlinearityFamily::Quadratic) return 0.0;
  return std::sqrt(1.5 * a_ / b_);
}

Potential Potential::cosine(double v0) {
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw std::invalid_argument("potential: v0 must be >= 0");
  Potential p;
  p.family_ = PotentialFamily::Cosine;
  p.v0_ = v0;
  return p;
}

std::string Potential::family_name() const {
  return family_ == PotentialFamily::Zero ? "none" : "cosine";
}

std::vector<double> Potential::sample(const Grid& grid) const {
  std::vector<double> v(grid.size(), 0.0);
  if (family_ == PotentialFamily::Cosine) {
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = v0_ * cosine_product(grid, p);
  }
  return v;
}

NlsModel::NlsModel(Grid grid, Potential potential, Nonlinearity nonlinearity)
    : grid_(std::move(grid)),
      potential_(potential),
      nonlinearity_(nonlinearity),
      v_(potential_.sample(grid_)) {}

NkgModel::NkgModel(Grid grid, Nonlinearity nonlinearity, double mass_amplitude)
    : grid_(std::move(grid)), nonlinearity_(nonlinearity), mass_amplitude_(mass_amplitude) {
  if (!(mass_amplitude >= 0.0) || !std::isfinite(mass_amplitude)) {
    throw std::invalid_argument("NKG mass amplitude must be >= 0");
  }
  h_.resize(grid_.size());
  for (std::size_t p = 0; p < h_.size(); ++p) {
    h_[p] = nonlinearity_.h() + mass_amplitude_ * cosine_product(grid_, p);
  }
  h0_ = *std::min_element(h_.begin(), h_.end());
  h_max_ = *std::max_element(h_.begin(), h_.end());
  if (!(h0_ > 0.0)) throw std::invalid_argument("NKG mass h(x) must be bounded below by h0 > 0");
}

std::vector<double> gradient_density(const Field& u) {
  const Grid& grid = u.grid;
  const SpectralOps& ops = grid.spectral();
  std::vector<Complex> hat(u.size());
  std::vector<Complex> deriv(u.size());
  ops.forward(u.values, hat);
  std::vector<double> density(u.size(), 0.0);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const auto k = ops.k_component(axis);
    for (std::size_t i = 0; i < hat.size(); ++i) deriv[i] = hat[i] * Complex(0.0, k[i]);
    ops.backward(deriv, deriv);
    for (std::size_t i = 0; i < deriv.size(); ++i) density[i] += std::norm(deriv[i]);
  }
  return density;
}

FunctionalValue energy(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "energy");
  FunctionalValue out;
  out.density = gradient_density(u);
  const auto& v = model.potential_samples();
  const Nonlinearity& w = model.nonlinearity();
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = std::abs(u.values[i]);
    out.density[i] = 0.5 * out.density[i] + v[i] * s * s + w.value(s);
  }
  out.value = sum_times_weight(u.grid, out.density);
  return out;
}

FunctionalValue energy(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "energy");
  FunctionalValue out;
  out.density = gradient_density(u.psi);
  const auto& h = model.mass_samples();
  const Nonlinearity& w = model.nonlinearity();
  for (std::size_t i = 0; i < out.density.size(); ++i) {
    const double s = std::abs(u.psi.values[i]);
    out.density[i] = 0.5 * std::norm(u.psi_dot.values[i]) + 0.5 * out.density[i] +
                     0.5 * h[i] * h[i] * s * s + w.higher_order(s);
  }
  out.value = sum_times_weight(u.grid(), out.density);
  return out;
}

FunctionalValue charge(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "charge");
  FunctionalValue out;
  out.density.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out.density[i] = std::norm(u.values[i]);
  out.value = sum_times_weight(u.grid, out.density);
  return out;
}

FunctionalValue charge(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "charge");
  FunctionalValue out;
  out.density.resize(u.psi.size());
  // -Re(i psi_dot conj(psi)) = Im(psi_dot conj(psi))
  for (std::size_t i = 0; i < out.density.size(); ++i) {
    out.density[i] = (u.psi_dot.values[i] * std::conj(u.psi.values[i])).imag();
  }
  out.value = sum_times_weight(u.grid(), out.density);
  return out;
}

double higher_order_part(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "higher_order_part");
  double s = 0.0;
  for (const Complex& c : u.values) s += model.nonlinearity().higher_order(std::abs(c));
  return u.grid.weight() * s;
}

double higher_order_part(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "higher_order_part");
  double s = 0.0;
  for (const Complex& c : u.psi.values) s += model.nonlinearity().higher_order(std::abs(c));
  return u.grid().weight() * s;
}

NlsVariation first_variation(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "first_variation");
  require_finite(u, "first_variation");
  std::vector<Complex> grad(u.size());
  u.grid.spectral().neg_laplacian(u.values, grad);
  const auto& v = model.potential_samples();
  const Nonlinearity& w = model.nonlinearity();
  std::vector<Complex> gc(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Complex ui = u.values[i];
    grad[i] += (2.0 * v[i] + w.derivative_over_s(std::abs(ui))) * ui;
    gc[i] = 2.0 * ui;
  }
  return {Field(u.grid, std::move(grad)), Field(u.grid, std::move(gc))};
}

NkgVariation first_variation(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "first_variation");
  require_finite(u.psi, "first_variation");
  require_finite(u.psi_dot, "first_variation");
  const std::size_t n = u.psi.size();
  std::vector<Complex> g0(n);
  u.grid().spectral().neg_laplacian(u.psi.values, g0);
  const auto& h = model.mass_samples();
  const Nonlinearity& w = model.nonlinearity();
  std::vector<Complex> c0(n), c1(n);
  const Complex i_unit(0.0, 1.0);
  for (std::size_t p = 0; p < n; ++p) {
    const Complex psi = u.psi.values[p];
    g0[p] += (h[p] * h[p] + w.higher_order_derivative_over_s(std::abs(psi))) * psi;
    c0[p] = -i_unit * u.psi_dot.values[p];
    c1[p] = i_unit * psi;
  }
  NkgState grad_e(Field(u.grid(), std::move(g0)), u.psi_dot);
  NkgState grad_c(Field(u.grid(), std::move(c0)), Field(u.grid(), std::move(c1)));
  return {std::move(grad_e), std::move(grad_c)};
}

double hylomorphy_ratio(const NlsModel& model, const Field& u) {
  const double c = charge(model, u).value;
  if (c == 0.0) throw std::domain_error("hylomorphy ratio undefined at zero charge");
  return energy(model, u).value / std::abs(c);
}

double hylomorphy_ratio(const NkgModel& model, const NkgState& u) {
  const double c = charge(model, u).value;
  if (c == 0.0) throw std::domain_error("hylomorphy ratio undefined at zero charge");
  return energy(model, u).value / std::abs(c);
}

Field apply_quadratic_operator(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "quadratic operator");
  std::vector<Complex> out(u.size());
  u.grid.spectral().neg_laplacian(u.values, out);
  const double h2 = model.nonlinearity().h() * model.nonlinearity().h();
  const auto& v = model.potential_samples();
  for (std::size_t i = 0; i < u.size(); ++i) out[i] += (h2 + 2.0 * v[i]) * u.values[i];
  return Field(u.grid, std::move(out));
}

NkgState apply_quadratic_operator(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "quadratic operator");
  std::vector<Complex> out(u.psi.size());
  u.grid().spectral().neg_laplacian(u.psi.values, out);
  const auto& h = model.mass_samples();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += h[i] * h[i] * u.psi.values[i];
  return NkgState(Field(u.grid(), std::move(out)), u.psi_dot);
}

double quadratic_norm(const NlsModel& model, const Field& u) {
  require_same_grid(model.grid(), u.grid, "quadratic_norm");
  const std::vector<double> grad = gradient_density(u);
  const double h2 = model.nonlinearity().h() * model.nonlinearity().h();
  const auto& v = model.potential_samples();
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += grad[i] + (h2 + 2.0 * v[i]) * std::norm(u.values[i]);
  return u.grid.weight() * s;
}

double quadratic_norm(const NkgModel& model, const NkgState& u) {
  require_same_grid(model.grid(), u.grid(), "quadratic_norm");
  const std::vector<double> grad = gradient_density(u.psi);
  const auto& h = model.mass_samples();
  double s = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    s += std::norm(u.psi_dot.values[i]) + grad[i] + h[i] * h[i] * std::norm(u.psi.values[i]);
  }
  return u.grid().weight() * s;
}

}  // namespace hylo

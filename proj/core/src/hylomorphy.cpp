#include "hylomorph/hylomorphy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hylomorph/errors.hpp"
#include "hylomorph/spectral.hpp"

namespace hylo {

namespace {

constexpr double kGolden = 0.6180339887498949;

double bulk_ratio(const Nonlinearity& w, double h_sup_squared, double s) {
  return h_sup_squared + 2.0 * w.higher_order(s) / (s * s);
}

Grid single_cell(const Grid& grid) {
  const int d = grid.dim();
  std::vector<std::int64_t> ones(static_cast<std::size_t>(d), 1);
  std::vector<std::int64_t> n(grid.points_per_cell().begin(), grid.points_per_cell().begin() + d);
  return Grid::build(grid.lattice(), ones, n);
}

// Lowest eigenpair of the real-symmetric operator `apply` by preconditioned
// steepest descent on the Rayleigh quotient with a 2x2 Rayleigh-Ritz step.
template <class Apply, class Precondition>
std::pair<double, int> lowest_rayleigh(const Grid& grid, Apply&& apply, Precondition&& precondition,
                                       const RayleighOptions& opts) {
  Field x(grid, std::vector<Complex>(grid.size(), Complex(1.0, 0.0)));
  auto scale = [](Field& f, double s) {
    for (Complex& c : f.values) c *= s;
  };
  auto axpy = [](Field& y, double a, const Field& f) {
    for (std::size_t i = 0; i < y.values.size(); ++i) y.values[i] += a * f.values[i];
  };
  scale(x, 1.0 / l2_norm(x));
  Field hx = apply(x);
  double lambda = real_inner(x, hx);
  for (int it = 0; it < opts.max_iter; ++it) {
    Field r = hx;
    axpy(r, -lambda, x);
    const double rnorm = l2_norm(r);
    if (rnorm <= opts.tol * std::max(std::abs(lambda), 1e-300)) return {lambda, it};
    Field w = precondition(r);
    axpy(w, -real_inner(w, x), x);
    const double wn = l2_norm(w);
    if (wn == 0.0) return {lambda, it};
    scale(w, 1.0 / wn);
    Field hw = apply(w);
    const double a = lambda;
    const double b = real_inner(x, hw);
    const double c = real_inner(w, hw);
    // Rotation towards the lower Ritz vector of [[a,b],[b,c]]; the angle
    // form avoids the cancellation in mu - a for tiny steps.
    const double theta = 0.5 * std::atan2(-2.0 * b, c - a);
    scale(x, std::cos(theta));
    axpy(x, std::sin(theta), w);
    scale(x, 1.0 / l2_norm(x));
    hx = apply(x);
    lambda = real_inner(x, hx);
  }
  throw ConvergenceError("Rayleigh quotient descent did not converge in " +
                         std::to_string(opts.max_iter) + " iterations");
}

double plateau_amplitude_default(double s_bar) { return s_bar > 0.0 ? s_bar : 1.0; }

std::vector<double> default_radii(const Grid& grid) {
  const double r_max = grid.inscribed_radius() - 1.0;
  std::vector<double> radii;
  if (r_max < 0.5) return radii;
  constexpr int kCount = 8;
  for (int i = 1; i <= kCount; ++i) radii.push_back(r_max * i / kCount);
  return radii;
}

std::vector<double> default_amplitudes(double s_bar) {
  std::vector<double> amps;
  for (int i = 0; i <= 20; ++i) amps.push_back(s_bar * (0.5 + 0.05 * i));
  return amps;
}

void check_radii(const Grid& grid, std::span<const double> radii) {
  for (double r : radii) {
    if (!(r > 0.0) || r + 1.0 > grid.inscribed_radius() + 1e-12) {
      throw std::invalid_argument("lambda_star_upper: box too small for plateau radius " +
                                  std::to_string(r) + " (inscribed radius " +
                                  std::to_string(grid.inscribed_radius()) + ")");
    }
  }
}

Field plateau_field(const Grid& grid, double radius, double amplitude) {
  const Point c = grid.box_center();
  std::vector<Complex> v(grid.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    const Point dx = grid.displacement(p, c);
    double r2 = 0.0;
    for (int i = 0; i < grid.dim(); ++i) r2 += dx[i] * dx[i];
    v[p] = plateau_ramp(radius, amplitude, std::sqrt(r2));
  }
  return Field(grid, std::move(v));
}

template <class Evaluate>
LambdaStarBound scan_plateaus(const Grid& grid, const PlateauScan& scan, double s_bar,
                              Evaluate&& evaluate) {
  std::vector<double> radii = scan.radii.empty() ? default_radii(grid) : scan.radii;
  if (radii.empty()) {
    throw std::invalid_argument("lambda_star_upper: box too small for any plateau (inscribed radius " +
                                std::to_string(grid.inscribed_radius()) + ")");
  }
  check_radii(grid, radii);
  const std::vector<double> amps =
      scan.amplitudes.empty() ? default_amplitudes(plateau_amplitude_default(s_bar)) : scan.amplitudes;
  LambdaStarBound best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (double r : radii) {
    Field base = plateau_field(grid, r, 1.0);
    for (double s : amps) {
      Field u = base;
      for (Complex& c : u.values) c *= s;
      const double lam = evaluate(u);
      if (std::isfinite(lam) && lam < best.value) best = {lam, r, s};
    }
  }
  return best;
}

}  // namespace

AlphaEstimate compute_alpha(const Nonlinearity& w, double h_sup_squared) {
  if (w.family() == NonlinearityFamily::Quadratic) return {std::sqrt(h_sup_squared), 1.0};
  const double s_min = 1e-6;
  const double s_max = w.root_scale() > 0.0 ? 10.0 * w.root_scale() : 50.0;
  constexpr int kSamples = 4000;
  auto at = [&](int k) { return s_min * std::pow(s_max / s_min, static_cast<double>(k) / kSamples); };
  int best = 0;
  double best_val = bulk_ratio(w, h_sup_squared, at(0));
  for (int k = 1; k <= kSamples; ++k) {
    const double v = bulk_ratio(w, h_sup_squared, at(k));
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  double lo = at(std::max(best - 1, 0));
  double hi = at(std::min(best + 1, kSamples));
  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = bulk_ratio(w, h_sup_squared, x1);
  double f2 = bulk_ratio(w, h_sup_squared, x2);
  while (hi - lo > 1e-10 * std::max(1.0, hi)) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = bulk_ratio(w, h_sup_squared, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = bulk_ratio(w, h_sup_squared, x2);
    }
  }
  const double s_star = 0.5 * (lo + hi);
  const double ratio = std::min(bulk_ratio(w, h_sup_squared, s_star), best_val);
  return {std::sqrt(std::max(ratio, 0.0)), s_star};
}

double compute_alpha(const NlsModel& model) {
  const double h = model.nonlinearity().h();
  return compute_alpha(model.nonlinearity(), h * h).alpha;
}

double compute_alpha(const NkgModel& model) {
  return compute_alpha(model.nonlinearity(), model.h_max() * model.h_max()).alpha;
}

E0Estimate estimate_e0(const NlsModel& model, const RayleighOptions& opts) {
  const NlsModel cell(single_cell(model.grid()), model.potential(), model.nonlinearity());
  const Grid& grid = cell.grid();
  const double h2 = cell.nonlinearity().h() * cell.nonlinearity().h();
  const auto& v = cell.potential_samples();
  auto apply = [&](const Field& f) {
    std::vector<Complex> out(f.size());
    grid.spectral().neg_laplacian(f.values, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.5 * out[i] + (0.5 * h2 + v[i]) * f.values[i];
    return Field(grid, std::move(out));
  };
  const double shift = 0.5 * h2 + model.potential().sup_norm() + 1.0;
  auto precondition = [&](const Field& f) {
    std::vector<Complex> out(f.size());
    grid.spectral().apply_symbol(f.values, out, [&](double k2) { return 1.0 / (0.5 * k2 + shift); });
    return Field(grid, std::move(out));
  };
  const auto [lambda, iters] = lowest_rayleigh(grid, apply, precondition, opts);
  E0Estimate out;
  out.lower = 0.5 * h2;
  out.upper = 0.5 * h2 + model.potential().sup_norm();
  out.rayleigh = lambda;
  out.iterations = iters;
  return out;
}

E0Estimate estimate_e0(const NkgModel& model, const RayleighOptions& opts) {
  const NkgModel cell(single_cell(model.grid()), model.nonlinearity(), model.mass_amplitude());
  const Grid& grid = cell.grid();
  const auto& h = cell.mass_samples();
  auto apply = [&](const Field& f) {
    std::vector<Complex> out(f.size());
    grid.spectral().neg_laplacian(f.values, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += h[i] * h[i] * f.values[i];
    return Field(grid, std::move(out));
  };
  const double shift = cell.h_max() * cell.h_max() + 1.0;
  auto precondition = [&](const Field& f) {
    std::vector<Complex> out(f.size());
    grid.spectral().apply_symbol(f.values, out, [&](double k2) { return 1.0 / (k2 + shift); });
    return Field(grid, std::move(out));
  };
  const auto [mu, iters] = lowest_rayleigh(grid, apply, precondition, opts);
  E0Estimate out;
  out.lower = model.h0();
  out.upper = model.h_max();
  out.rayleigh = std::sqrt(std::max(mu, 0.0));
  out.iterations = iters;
  return out;
}

double plateau_ramp(double radius, double amplitude, double r) noexcept {
  if (r <= radius) return amplitude;
  if (r >= radius + 1.0) return 0.0;
  return amplitude * (radius + 1.0 - r);
}

LambdaStarBound lambda_star_upper(const NlsModel& model, const PlateauScan& scan) {
  const double h = model.nonlinearity().h();
  const AlphaEstimate a = compute_alpha(model.nonlinearity(), h * h);
  return scan_plateaus(model.grid(), scan, a.minimizing_amplitude,
                       [&](const Field& u) { return hylomorphy_ratio(model, u); });
}

LambdaStarBound lambda_star_upper(const NkgModel& model, const PlateauScan& scan) {
  const AlphaEstimate a = compute_alpha(model.nonlinearity(), model.h_max() * model.h_max());
  const Complex rate(0.0, -a.alpha);
  return scan_plateaus(model.grid(), scan, a.minimizing_amplitude, [&](const Field& u) {
    Field dot = u;
    for (Complex& c : dot.values) c *= rate;
    const NkgState state(u, std::move(dot));
    const double c = charge(model, state).value;
    if (c == 0.0) return std::numeric_limits<double>::infinity();
    return energy(model, state).value / std::abs(c);
  });
}

namespace {

template <class Model>
double plateau_bound_or_nan(const Model& model) {
  if (model.grid().inscribed_radius() - 1.0 < 0.5) return std::numeric_limits<double>::quiet_NaN();
  return lambda_star_upper(model).value;
}

}  // namespace

HylomorphyReport check_hylomorphy(const NlsModel& model) {
  HylomorphyReport r;
  const double h = model.nonlinearity().h();
  r.alpha = compute_alpha(model);
  const E0Estimate e0 = estimate_e0(model);
  r.e0_lower = e0.lower;
  r.e0_upper = e0.upper;
  r.e0_rayleigh = e0.rayleigh;
  r.lambda_star_upper = plateau_bound_or_nan(model);
  r.margin = 0.5 * h * h - 0.5 * r.alpha * r.alpha - model.potential().sup_norm();
  r.passes = r.margin > 0.0;
  return r;
}

HylomorphyReport check_hylomorphy(const NkgModel& model) {
  HylomorphyReport r;
  r.alpha = compute_alpha(model);
  const E0Estimate e0 = estimate_e0(model);
  r.e0_lower = e0.lower;
  r.e0_upper = e0.upper;
  r.e0_rayleigh = e0.rayleigh;
  r.lambda_star_upper = plateau_bound_or_nan(model);
  r.margin = model.h0() - r.alpha;
  r.passes = r.margin > 0.0;
  return r;
}

BestCell best_cell(const Grid& grid, std::span<const double> energy_density,
                   std::span<const double> charge_density) {
  const std::vector<double> e = cell_sums(grid, energy_density);
  const std::vector<double> c = cell_sums(grid, charge_density);
  double total = 0.0;
  for (double v : c) total += v;
  const double orientation = total < 0.0 ? -1.0 : 1.0;
  BestCell best;
  best.ratio = std::numeric_limits<double>::infinity();
  double sum_e = 0.0;
  double sum_c = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    const double cj = orientation * c[j];
    if (!(cj > 0.0)) continue;
    ++best.eligible;
    sum_e += e[j];
    sum_c += cj;
    const double ratio = e[j] / cj;
    if (ratio < best.ratio) {
      best.ratio = ratio;
      best.linear = j;
    }
  }
  if (best.eligible == 0) throw std::domain_error("best_cell: no cell carries charge");
  best.cell = grid.cell_unravel(best.linear);
  best.aggregate = sum_e / sum_c;
  return best;
}

BestCell best_cell(const NlsModel& model, const Field& u) {
  return best_cell(model.grid(), energy(model, u).density, charge(model, u).density);
}

BestCell best_cell(const NkgModel& model, const NkgState& u) {
  return best_cell(model.grid(), energy(model, u).density, charge(model, u).density);
}

namespace {

Field add(const Field& a, const Field& b) {
  require_same_grid(a.grid, b.grid, "splitting_defect");
  Field out = a;
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
  return out;
}

}  // namespace

SplittingDefect splitting_defect(const NlsModel& model, const Field& u, const Field& w) {
  const Field sum = add(u, w);
  return {energy(model, sum).value - energy(model, u).value - energy(model, w).value,
          charge(model, sum).value - charge(model, u).value - charge(model, w).value};
}

SplittingDefect splitting_defect(const NkgModel& model, const NkgState& u, const NkgState& w) {
  const NkgState sum(add(u.psi, w.psi), add(u.psi_dot, w.psi_dot));
  return {energy(model, sum).value - energy(model, u).value - energy(model, w).value,
          charge(model, sum).value - charge(model, u).value - charge(model, w).value};
}

Field sample_profile(const Grid& grid, const Profile& profile) {
  const Point c = grid.box_center();
  std::vector<Complex> v(grid.size());
  for (std::size_t p = 0; p < v.size(); ++p) v[p] = profile(grid.displacement(p, c));
  return Field(grid, std::move(v));
}

std::vector<DilationRow> dilation_scan(const NlsModel& model, const Profile& profile,
                                       std::span<const double> thetas) {
  std::vector<DilationRow> rows;
  rows.reserve(thetas.size());
  for (double theta : thetas) {
    if (!(theta > 0.0)) throw std::invalid_argument("dilation_scan: theta must be > 0");
    const Field u = sample_profile(model.grid(), [&](const Point& x) {
      Point y{};
      for (int i = 0; i < kMaxDim; ++i) y[i] = theta * x[i];
      return profile(y);
    });
    DilationRow row;
    row.theta = theta;
    row.energy = energy(model, u).value;
    row.charge = charge(model, u).value;
    row.lambda = row.charge != 0.0 ? row.energy / row.charge : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hylo

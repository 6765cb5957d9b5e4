#include "hylomorph/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include "hylomorph/hylomorphy.hpp"
#include "hylomorph/parallel.hpp"
#include "hylomorph/spectral.hpp"

namespace hylo {

namespace {

constexpr double kMaxStep = 50.0;
constexpr double kMinStep = 1e-14;
constexpr double kDescentSlack = 1e-13;

void scale_to_charge(Field& u, double sigma) {
  const double rho = real_inner(u, u);
  if (!(rho > 0.0)) throw std::invalid_argument("cannot rescale a zero field to positive charge");
  const double s = std::sqrt(sigma / rho);
  for (Complex& c : u.values) c *= s;
}

Field precondition(const Field& f, double shift) {
  std::vector<Complex> out(f.size());
  f.grid.spectral().apply_symbol(f.values, out, [shift](double k2) { return 1.0 / (k2 + shift); });
  return Field(f.grid, std::move(out));
}

std::vector<Index> start_cells(const Grid& grid, int restarts, std::uint64_t seed) {
  std::vector<std::size_t> order(grid.num_cells());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Index> cells;
  for (int r = 0; r < restarts; ++r) {
    cells.push_back(grid.cell_unravel(order[static_cast<std::size_t>(r) % order.size()]));
  }
  return cells;
}

double nls_residual_at(const NlsModel& model, const Field& u, double sigma) {
  const double omega = real_inner(first_variation(model, u).energy, u) / (2.0 * sigma);
  return nls_stationary_residual(model, u, omega);
}

// Inside the roundoff band of E a step is taken only if it also lowers the
// stationary residual; otherwise the iteration wanders once E stops resolving.
template <class Residual>
bool accept_step(double et, double e, double current_residual, Residual&& trial_residual) {
  if (!std::isfinite(et)) return false;
  const double slack = kDescentSlack * std::abs(e);
  if (et < e - slack) return true;
  if (et > e + slack) return false;
  return trial_residual() < current_residual;
}

SolitonResult descend_nls(const NlsModel& model, Field u, const SolverOptions& opts) {
  const double sigma = opts.sigma;
  const double h = model.nonlinearity().h();
  double shift = h * h + 2.0 * model.potential().sup_norm();
  if (shift <= 0.0) shift = 1.0;
  scale_to_charge(u, sigma);

  double tau = opts.step;
  double e = energy(model, u).value;
  SolitonResult out{u, std::nullopt};
  int it = 0;
  for (;; ++it) {
    const NlsVariation var = first_variation(model, u);
    const double omega = real_inner(var.energy, u) / (2.0 * sigma);
    out.omega = omega;
    out.residual = nls_stationary_residual(model, u, omega);
    if (out.residual <= opts.tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    const Field pe = precondition(var.energy, shift);
    const Field pu = precondition(u, shift);
    const double beta = real_inner(pe, u) / real_inner(pu, u);
    std::vector<Complex> dir(u.size());
    for (std::size_t i = 0; i < dir.size(); ++i) dir[i] = pe.values[i] - beta * pu.values[i];

    bool accepted = false;
    while (tau >= kMinStep) {
      Field trial = u;
      for (std::size_t i = 0; i < dir.size(); ++i) trial.values[i] -= tau * dir[i];
      scale_to_charge(trial, sigma);
      const double et = energy(model, trial).value;
      if (accept_step(et, e, out.residual, [&] { return nls_residual_at(model, trial, sigma); })) {
        u = std::move(trial);
        e = et;
        tau = std::min(tau * 1.1, kMaxStep);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;
  }
  out.profile = u;
  out.iterations = it;
  out.energy = e;
  out.charge = charge(model, u).value;
  out.lambda = out.energy / std::abs(out.charge);
  return out;
}

SolitonResult descend_nkg(const NkgModel& model, Field psi, const SolverOptions& opts) {
  const double sigma = opts.sigma;
  const double shift = model.h0() * model.h0();
  double tau = opts.step;
  double e = nkg_reduced_energy(model, psi, sigma);
  SolitonResult out{psi, std::nullopt};
  int it = 0;
  const Field zero = Field::zeros(psi.grid);
  for (;; ++it) {
    const double rho = real_inner(psi, psi);
    const double omega = sigma / rho;
    NkgVariation var = first_variation(model, NkgState(psi, zero));
    Field g = std::move(var.energy.psi);
    for (std::size_t i = 0; i < g.size(); ++i) g.values[i] -= omega * omega * psi.values[i];
    out.omega = omega;
    out.residual = l2_norm(g) / (omega * omega * std::sqrt(rho));
    if (out.residual <= opts.tol) {
      out.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    const Field dir = precondition(g, shift);
    bool accepted = false;
    while (tau >= kMinStep) {
      Field trial = psi;
      for (std::size_t i = 0; i < dir.size(); ++i) trial.values[i] -= tau * dir.values[i];
      const double et = nkg_reduced_energy(model, trial, sigma);
      if (accept_step(et, e, out.residual, [&] { return nkg_stationary_residual(model, trial, sigma / real_inner(trial, trial)); })) {
        psi = std::move(trial);
        e = et;
        tau = std::min(tau * 1.1, kMaxStep);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;
  }
  const double rho = real_inner(psi, psi);
  out.omega = sigma / rho;
  out.profile = psi;
  Field dot = psi;
  for (Complex& c : dot.values) c *= Complex(0.0, -out.omega);
  out.profile_dot = dot;
  const NkgState state(psi, std::move(dot));
  out.iterations = it;
  out.energy = energy(model, state).value;
  out.charge = charge(model, state).value;
  out.lambda = out.energy / std::abs(out.charge);
  return out;
}

template <class Descend>
SolitonResult multi_start(const Grid& grid, const SolverOptions& opts, double initial_charge,
                          const std::optional<Field>& initial, Descend&& descend) {
  if (initial) {
    require_same_grid(grid, initial->grid, "minimize");
    return descend(*initial);
  }
  const std::vector<Index> cells = start_cells(grid, opts.restarts, opts.seed);
  std::vector<std::optional<SolitonResult>> results(cells.size());
  parallel_for(cells.size(), [&](std::size_t i) {
    results[i] = descend(gaussian_bump(grid, cells[i], initial_charge));
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i]->energy < results[best]->energy) best = i;
  }
  SolitonResult out = std::move(*results[best]);
  out.start = best;
  return out;
}

template <class Model, class Minimize>
SweepTable sweep(const Model& model, std::span<const double> sigmas, const SolverOptions& opts,
                 Minimize&& minimize) {
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw std::invalid_argument("sigma_sweep: sigmas must be positive");
    if (i > 0 && sigmas[i] < sigmas[i - 1]) throw std::invalid_argument("sigma_sweep: sigmas must be sorted");
  }
  SweepTable table;
  table.e0_rayleigh = estimate_e0(model).rayleigh;
  std::optional<Field> warm;
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    SolverOptions o = opts;
    o.sigma = sigmas[i];
    if (warm && i > 0) {
      const double s = std::sqrt(sigmas[i] / sigmas[i - 1]);
      for (Complex& c : warm->values) c *= s;
    }
    // The warm start can stay trapped on a spread-out branch; keep whichever
    // of warm and cold start reaches the lower ratio.
    SolitonResult r = minimize(model, o, std::nullopt);
    if (warm) {
      SolitonResult w = minimize(model, o, warm);
      if (w.converged && (!r.converged || w.lambda < r.lambda)) r = std::move(w);
    }
    SweepRow row;
    row.sigma = sigmas[i];
    row.lambda_upper = r.lambda;
    row.energy = r.energy;
    row.omega = r.omega;
    row.converged = r.converged;
    row.existence_flag = r.lambda < table.e0_rayleigh * (1.0 - 1e-9);
    if (!table.rows.empty()) {
      const SweepRow& prev = table.rows.back();
      row.sigma_lambda_increasing = row.sigma * row.lambda_upper > prev.sigma * prev.lambda_upper;
    }
    table.rows.push_back(row);
    warm = r.profile;
    table.results.push_back(std::move(r));
  }
  return table;
}

}  // namespace

void SolverOptions::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("solver: sigma must be > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("solver: tol must be > 0");
  if (!(step > 0.0)) throw std::invalid_argument("solver: step must be > 0");
  if (max_iter < 0) throw std::invalid_argument("solver: max_iter must be >= 0");
  if (restarts < 1) throw std::invalid_argument("solver: restarts must be >= 1");
}

NkgState SolitonResult::nkg_state() const {
  if (profile_dot) return NkgState(profile, *profile_dot);
  Field dot = profile;
  for (Complex& c : dot.values) c *= Complex(0.0, -omega);
  return NkgState(profile, std::move(dot));
}

Field gaussian_bump(const Grid& grid, const Index& cell, double charge) {
  Point q{};
  for (int i = 0; i < grid.dim(); ++i) q[i] = static_cast<double>(cell[i]) + 0.5;
  const Point center = grid.lattice().apply(q);
  const double width = 0.5 * std::pow(grid.lattice().cell_volume(), 1.0 / grid.dim());
  std::vector<Complex> v(grid.size());
  for (std::size_t p = 0; p < v.size(); ++p) {
    const Point dx = grid.displacement(p, center);
    double r2 = 0.0;
    for (int i = 0; i < grid.dim(); ++i) r2 += dx[i] * dx[i];
    v[p] = std::exp(-0.5 * r2 / (width * width));
  }
  Field u(grid, std::move(v));
  scale_to_charge(u, charge);
  return u;
}

double nls_stationary_residual(const NlsModel& model, const Field& u, double omega) {
  const NlsVariation var = first_variation(model, u);
  Field r = var.energy;
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= omega * var.charge.values[i];
  const double denom = l2_norm(var.energy);
  return denom > 0.0 ? l2_norm(r) / denom : 0.0;
}

double nkg_stationary_residual(const NkgModel& model, const Field& psi, double omega) {
  NkgVariation var = first_variation(model, NkgState(psi, Field::zeros(psi.grid)));
  Field r = std::move(var.energy.psi);
  for (std::size_t i = 0; i < r.size(); ++i) r.values[i] -= omega * omega * psi.values[i];
  const double denom = omega * omega * l2_norm(psi);
  return denom > 0.0 ? l2_norm(r) / denom : 0.0;
}

double nkg_reduced_energy(const NkgModel& model, const Field& psi, double sigma) {
  const double rho = real_inner(psi, psi);
  const double static_part = energy(model, NkgState(psi, Field::zeros(psi.grid))).value;
  return sigma * sigma / (2.0 * rho) + static_part;
}

SolitonResult minimize_nls(const NlsModel& model, const SolverOptions& opts,
                           const std::optional<Field>& initial) {
  opts.validate();
  return multi_start(model.grid(), opts, opts.sigma, initial,
                     [&](Field u0) { return descend_nls(model, std::move(u0), opts); });
}

SolitonResult minimize_nkg(const NkgModel& model, const SolverOptions& opts,
                           const std::optional<Field>& initial) {
  opts.validate();
  // Start with omega halfway between the bulk rate alpha and the vacuum rate h0.
  const double alpha = compute_alpha(model);
  const double omega0 = 0.5 * (alpha + model.h0());
  return multi_start(model.grid(), opts, opts.sigma / omega0, initial,
                     [&](Field psi0) { return descend_nkg(model, std::move(psi0), opts); });
}

SweepTable sigma_sweep(const NlsModel& model, std::span<const double> sigmas, const SolverOptions& opts) {
  return sweep(model, sigmas, opts, [](const NlsModel& m, const SolverOptions& o, const std::optional<Field>& w) {
    return minimize_nls(m, o, w);
  });
}

SweepTable sigma_sweep(const NkgModel& model, std::span<const double> sigmas, const SolverOptions& opts) {
  return sweep(model, sigmas, opts, [](const NkgModel& m, const SolverOptions& o, const std::optional<Field>& w) {
    return minimize_nkg(m, o, w);
  });
}

}  // namespace hylo

#include "hylomorph/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hylomorph/spectral.hpp"

namespace hylo {

namespace {

constexpr double kBlowupAmplitude = 1e6;
constexpr std::size_t kShortlist = 3;

// Empty string when the field is sane.
std::string blowup_check(const Field& f) {
  double peak = 0.0;
  for (const Complex& c : f.values) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return "non-finite value";
    peak = std::max(peak, std::abs(c));
  }
  if (peak > kBlowupAmplitude) {
    std::ostringstream os;
    os << "max|psi| = " << peak << " exceeds " << kBlowupAmplitude;
    return os.str();
  }
  return {};
}

Complex correlation(const Field& a, const Field& b) {
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * std::conj(b.values[i]);
  return a.grid.weight() * s;
}

Field scaled(const Field& f, Complex factor) {
  Field out = f;
  for (Complex& c : out.values) c *= factor;
  return out;
}

void axpy(Field& y, Complex a, const Field& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y.values[i] += a * x.values[i];
}

std::vector<Index> all_shifts(const Grid& grid) {
  std::vector<Index> shifts(grid.num_cells());
  for (std::size_t c = 0; c < shifts.size(); ++c) shifts[c] = grid.cell_unravel(c);
  return shifts;
}

// Indices of the `k` largest values, ties to the lower index.
std::vector<std::size_t> top_k(const std::vector<double>& score, std::size_t k) {
  std::vector<std::size_t> order(score.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  k = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) { return score[a] > score[b] || (score[a] == score[b] && a < b); });
  order.resize(k);
  return order;
}

template <class Model, class State, class Corr, class Shift, class Combine>
double orbit_distance_impl(const Model& model, const State& base, const State& state, const Grid& grid,
                           Corr&& corr, Shift&& shift, Combine&& combine) {
  const std::vector<Index> shifts = all_shifts(grid);
  const State ls = apply_quadratic_operator(model, state);
  std::vector<Complex> c(shifts.size());
  std::vector<double> score(shifts.size());
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    c[i] = corr(ls, shift(base, shifts[i]));
    score[i] = std::abs(c[i]);
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : top_k(score, kShortlist)) {
    const Complex phase = score[i] > 0.0 ? c[i] / score[i] : Complex(1.0, 0.0);
    const State diff = combine(state, shift(base, shifts[i]), phase);
    best = std::min(best, quadratic_norm(model, diff));
  }
  return std::sqrt(std::max(best, 0.0));
}

std::vector<Complex> kinetic_propagator(const Grid& grid, double dt) {
  const auto k2 = grid.spectral().k_squared();
  std::vector<Complex> out(k2.size());
  // Half-angle form: the factors are reused every step, and std::polar's
  // modulus error is biased enough to drift the charge by ~1e-12 per 1e4 steps.
  for (std::size_t i = 0; i < k2.size(); ++i) {
    const double t = std::tan(-0.25 * k2[i] * dt);
    out[i] = Complex(1.0 - t * t, 2.0 * t) / (1.0 + t * t);
  }
  return out;
}

void nonlinear_rotation(const NlsModel& model, Field& psi, double tau) {
  const auto& v = model.potential_samples();
  const Nonlinearity& w = model.nonlinearity();
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double s = std::abs(psi.values[i]);
    const double rate = v[i] + 0.5 * w.derivative_over_s(s);
    psi.values[i] *= std::polar(1.0, -rate * tau);
  }
}

Field nkg_force(const NkgModel& model, const Field& psi) {
  std::vector<Complex> out(psi.size());
  psi.grid.spectral().neg_laplacian(psi.values, out);
  const auto& h = model.mass_samples();
  const Nonlinearity& w = model.nonlinearity();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Complex p = psi.values[i];
    out[i] = -out[i] - (h[i] * h[i] + w.higher_order_derivative_over_s(std::abs(p))) * p;
  }
  return Field(psi.grid, std::move(out));
}

template <class Model, class State, class Ref>
MonitorSample monitor(const Model& model, const Ref& ref, const State& state, double t) {
  MonitorSample m;
  m.t = t;
  m.energy = energy(model, state).value;
  m.charge = charge(model, state).value;
  m.orbit_distance = orbit_distance(model, ref.base, state);
  const double de = m.energy - ref.energy;
  const double dc = std::abs(m.charge) - ref.charge;
  m.lyapunov = de * de + dc * dc;
  return m;
}

template <class Model, class State, class Ref, class Step, class Check>
Trajectory<State> integrate(const Model& model, const State& state0, const EvolveOptions& opts, const Ref& ref,
                            const Observer<State>& observer, Step&& step, Check&& check) {
  Trajectory<State> traj(state0);
  traj.dt = opts.dt;
  State& state = traj.final_state;
  auto record = [&](std::int64_t n) {
    const double t = static_cast<double>(n) * opts.dt;
    traj.times.push_back(t);
    traj.monitors.push_back(monitor(model, ref, state, t));
    if (opts.keep_snapshots) traj.snapshots.push_back(state);
    if (observer) observer(t, state);
  };
  record(0);
  for (std::int64_t n = 1; n <= opts.steps; ++n) {
    step(state);
    const std::string bad = check(state);
    if (!bad.empty()) {
      traj.blowup = true;
      std::ostringstream os;
      os << "step " << n << " (t = " << static_cast<double>(n) * opts.dt << "): " << bad;
      traj.diagnostic = os.str();
      break;
    }
    if (n % opts.stride == 0 || n == opts.steps) record(n);
  }
  return traj;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

double unit_q_scale(double q2) {
  if (!(q2 > 0.0)) throw std::runtime_error("perturbation noise has zero norm");
  return 1.0 / std::sqrt(q2);
}

}  // namespace

void EvolveOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("evolve: dt must be > 0");
  if (steps < 0) throw std::invalid_argument("evolve: steps must be >= 0");
  if (stride < 1) throw std::invalid_argument("evolve: stride must be >= 1");
}

StandingWaveProbe::StandingWaveProbe(const Field& psi0, double omega)
    : psi0_(psi0), omega_(omega), norm0_(l2_norm(psi0)) {
  mod0_.resize(psi0.size());
  for (std::size_t i = 0; i < mod0_.size(); ++i) mod0_[i] = std::abs(psi0.values[i]);
}

void StandingWaveProbe::observe(double t, const Field& psi) {
  const double w = psi.grid.weight();
  double dm = 0.0, dt = 0.0;
  const Complex rot = std::polar(1.0, -omega_ * t);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double m = std::abs(psi.values[i]) - mod0_[i];
    dm += m * m;
    dt += std::norm(psi.values[i] - psi0_.values[i] * rot);
  }
  report_.max_modulus_deviation = std::max(report_.max_modulus_deviation, std::sqrt(w * dm) / norm0_);
  report_.max_tracking_error = std::max(report_.max_tracking_error, std::sqrt(w * dt) / norm0_);
  double phase = std::arg(correlation(psi, psi0_));
  if (!phases_.empty()) {
    const double prev = phases_.back();
    phase += 2.0 * std::numbers::pi * std::round((prev - phase) / (2.0 * std::numbers::pi));
  }
  times_.push_back(t);
  phases_.push_back(phase);
}

StandingWaveReport StandingWaveProbe::finish(bool blowup) const {
  StandingWaveReport r = report_;
  r.omega = omega_;
  r.phase_rate = -least_squares_slope(times_, phases_);
  r.phase_rate_error = omega_ != 0.0 ? std::abs(r.phase_rate - omega_) / std::abs(omega_)
                                     : std::numeric_limits<double>::quiet_NaN();
  r.blowup = blowup;
  return r;
}

NlsOrbitReference make_reference(const NlsModel& model, const SolitonResult& result) {
  require_same_grid(model.grid(), result.profile.grid, "make_reference");
  return {result.profile, result.omega, std::abs(result.charge), result.energy};
}

NkgOrbitReference make_reference(const NkgModel& model, const SolitonResult& result) {
  require_same_grid(model.grid(), result.profile.grid, "make_reference");
  return {result.nkg_state(), result.omega, std::abs(result.charge), result.energy};
}

double orbit_distance(const NlsModel& model, const Field& base, const Field& state) {
  require_same_grid(base.grid, state.grid, "orbit_distance");
  return orbit_distance_impl(
      model, base, state, state.grid, correlation, [](const Field& f, const Index& z) { return translate(f, z); },
      [](const Field& s, const Field& r, Complex phase) {
        Field d = s;
        axpy(d, -phase, r);
        return d;
      });
}

double orbit_distance(const NkgModel& model, const NkgState& base, const NkgState& state) {
  require_same_grid(base.grid(), state.grid(), "orbit_distance");
  return orbit_distance_impl(
      model, base, state, state.grid(),
      [](const NkgState& a, const NkgState& b) { return correlation(a.psi, b.psi) + correlation(a.psi_dot, b.psi_dot); },
      [](const NkgState& f, const Index& z) { return translate(f, z); },
      [](const NkgState& s, const NkgState& r, Complex phase) {
        NkgState d = s;
        axpy(d.psi, -phase, r.psi);
        axpy(d.psi_dot, -phase, r.psi_dot);
        return d;
      });
}

double lyapunov(const NlsModel& model, const Field& state, double sigma, double c_sigma) {
  const double de = energy(model, state).value - c_sigma;
  const double dc = std::abs(charge(model, state).value) - sigma;
  return de * de + dc * dc;
}

double lyapunov(const NkgModel& model, const NkgState& state, double sigma, double c_sigma) {
  const double de = energy(model, state).value - c_sigma;
  const double dc = std::abs(charge(model, state).value) - sigma;
  return de * de + dc * dc;
}

double nkg_cfl_limit(const NkgModel& model) {
  const double h = model.h_max();
  return 2.0 / std::sqrt(model.grid().spectral().k_squared_max() + h * h);
}

NkgState reverse_velocity(const NkgState& state) {
  return NkgState(state.psi, scaled(state.psi_dot, -1.0));
}

NlsTrajectory evolve_nls(const NlsModel& model, const Field& psi0, const EvolveOptions& opts,
                         const std::optional<NlsOrbitReference>& ref, const Observer<Field>& observer) {
  opts.validate();
  require_same_grid(model.grid(), psi0.grid, "evolve_nls");
  const NlsOrbitReference r = ref ? *ref
                                  : NlsOrbitReference{psi0, 0.0, std::abs(charge(model, psi0).value),
                                                      energy(model, psi0).value};
  require_same_grid(model.grid(), r.base.grid, "evolve_nls reference");
  const std::vector<Complex> kinetic = kinetic_propagator(model.grid(), opts.dt);
  const SpectralOps& fft = model.grid().spectral();
  std::vector<Complex> hat(psi0.size());
  auto step = [&](Field& psi) {
    nonlinear_rotation(model, psi, 0.5 * opts.dt);
    fft.forward(psi.values, hat);
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= kinetic[i];
    fft.backward(hat, psi.values);
    nonlinear_rotation(model, psi, 0.5 * opts.dt);
  };
  return integrate(model, psi0, opts, r, observer, step, blowup_check);
}

NkgTrajectory evolve_nkg(const NkgModel& model, const NkgState& state0, const EvolveOptions& opts,
                         const std::optional<NkgOrbitReference>& ref, const Observer<NkgState>& observer) {
  opts.validate();
  require_same_grid(model.grid(), state0.grid(), "evolve_nkg");
  const double limit = nkg_cfl_limit(model);
  if (opts.dt > limit) {
    std::ostringstream os;
    os << "evolve_nkg: dt = " << opts.dt << " exceeds the CFL limit " << limit;
    throw std::invalid_argument(os.str());
  }
  const NkgOrbitReference r = ref ? *ref
                                  : NkgOrbitReference{state0, 0.0, std::abs(charge(model, state0).value),
                                                      energy(model, state0).value};
  require_same_grid(model.grid(), r.base.grid(), "evolve_nkg reference");
  Field force = nkg_force(model, state0.psi);
  const double half = 0.5 * opts.dt;
  auto step = [&](NkgState& s) {
    axpy(s.psi_dot, half, force);
    axpy(s.psi, opts.dt, s.psi_dot);
    force = nkg_force(model, s.psi);
    axpy(s.psi_dot, half, force);
  };
  auto check = [](const NkgState& s) {
    std::string bad = blowup_check(s.psi);
    if (bad.empty() && !s.psi_dot.all_finite()) bad = "non-finite value in psi_dot";
    return bad;
  };
  return integrate(model, state0, opts, r, observer, step, check);
}

Field band_limited_noise(const Grid& grid, std::uint64_t seed, double fraction) {
  if (!(fraction > 0.0) || fraction > 1.0) throw std::invalid_argument("band_limited_noise: fraction must be in (0, 1]");
  const SpectralOps& fft = grid.spectral();
  const auto k2 = fft.k_squared();
  const double cutoff = fraction * fraction * fft.k_squared_max();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Complex> hat(grid.size());
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    if (k2[i] <= cutoff) hat[i] = Complex(re, im);
  }
  std::vector<Complex> values(grid.size());
  fft.backward(hat, values);
  Field v(grid, std::move(values));
  const double n = l2_norm(v);
  if (!(n > 0.0)) throw std::runtime_error("band_limited_noise: empty band");
  return scaled(v, 1.0 / n);
}

StabilityReport stability_experiment(const NlsModel& model, const SolitonResult& result,
                                     const StabilityOptions& opts, NlsTrajectory* trajectory) {
  if (!result.converged) throw std::invalid_argument("stability_experiment: result did not converge");
  const NlsOrbitReference ref = make_reference(model, result);
  StabilityReport rep;
  rep.reference_norm = std::sqrt(quadratic_norm(model, ref.base));

  Field u0 = ref.base;
  if (opts.delta > 0.0) {
    const Field v = band_limited_noise(model.grid(), opts.seed);
    axpy(u0, opts.delta * rep.reference_norm * unit_q_scale(quadratic_norm(model, v)), v);
    const double c = charge(model, u0).value;
    u0 = scaled(u0, std::sqrt(ref.charge / c));
  }

  EvolveOptions eo;
  eo.dt = opts.dt;
  eo.steps = static_cast<std::int64_t>(std::llround(opts.horizon / opts.dt));
  eo.stride = opts.stride;
  NlsTrajectory traj = evolve_nls(model, u0, eo, ref, [&](double t, const Field& s) {
    rep.cell_track.push_back({t, best_cell(model, s)});
  });
  rep.blowup = traj.blowup;
  rep.diagnostic = traj.diagnostic;
  rep.initial_distance = traj.monitors.front().orbit_distance;
  rep.initial_lyapunov = traj.monitors.front().lyapunov;
  for (const MonitorSample& m : traj.monitors) {
    rep.max_orbit_distance = std::max(rep.max_orbit_distance, m.orbit_distance);
    rep.max_lyapunov = std::max(rep.max_lyapunov, m.lyapunov);
  }
  rep.max_relative_distance = rep.max_orbit_distance / rep.reference_norm;
  if (trajectory) *trajectory = std::move(traj);
  return rep;
}

StabilityReport stability_experiment(const NkgModel& model, const SolitonResult& result,
                                     const StabilityOptions& opts, NkgTrajectory* trajectory) {
  if (!result.converged) throw std::invalid_argument("stability_experiment: result did not converge");
  const NkgOrbitReference ref = make_reference(model, result);
  StabilityReport rep;
  rep.reference_norm = std::sqrt(quadratic_norm(model, ref.base));

  NkgState u0 = ref.base;
  if (opts.delta > 0.0) {
    const NkgState v(band_limited_noise(model.grid(), opts.seed),
                     band_limited_noise(model.grid(), opts.seed + 1));
    const double a = opts.delta * rep.reference_norm * unit_q_scale(quadratic_norm(model, v));
    axpy(u0.psi, a, v.psi);
    axpy(u0.psi_dot, a, v.psi_dot);
    const double c = std::abs(charge(model, u0).value);
    const double s = std::sqrt(ref.charge / c);
    u0 = NkgState(scaled(u0.psi, s), scaled(u0.psi_dot, s));
  }

  EvolveOptions eo;
  eo.dt = opts.dt;
  eo.steps = static_cast<std::int64_t>(std::llround(opts.horizon / opts.dt));
  eo.stride = opts.stride;
  NkgTrajectory traj = evolve_nkg(model, u0, eo, ref, [&](double t, const NkgState& s) {
    rep.cell_track.push_back({t, best_cell(model, s)});
  });
  rep.blowup = traj.blowup;
  rep.diagnostic = traj.diagnostic;
  rep.initial_distance = traj.monitors.front().orbit_distance;
  rep.initial_lyapunov = traj.monitors.front().lyapunov;
  for (const MonitorSample& m : traj.monitors) {
    rep.max_orbit_distance = std::max(rep.max_orbit_distance, m.orbit_distance);
    rep.max_lyapunov = std::max(rep.max_lyapunov, m.lyapunov);
  }
  rep.max_relative_distance = rep.max_orbit_distance / rep.reference_norm;
  if (trajectory) *trajectory = std::move(traj);
  return rep;
}

StandingWaveReport standing_wave_check(const NlsModel& model, const SolitonResult& result, double horizon,
                                       double dt, std::int64_t sample_stride) {
  StandingWaveProbe probe(result.profile, result.omega);
  EvolveOptions eo;
  eo.dt = dt;
  eo.steps = static_cast<std::int64_t>(std::llround(horizon / dt));
  eo.stride = sample_stride;
  const NlsTrajectory traj = evolve_nls(model, result.profile, eo, make_reference(model, result),
                                        [&](double t, const Field& s) { probe.observe(t, s); });
  return probe.finish(traj.blowup);
}

StandingWaveReport standing_wave_check(const NkgModel& model, const SolitonResult& result, double horizon,
                                       double dt, std::int64_t sample_stride) {
  StandingWaveProbe probe(result.profile, result.omega);
  EvolveOptions eo;
  eo.dt = dt;
  eo.steps = static_cast<std::int64_t>(std::llround(horizon / dt));
  eo.stride = sample_stride;
  const NkgOrbitReference ref = make_reference(model, result);
  const NkgTrajectory traj = evolve_nkg(model, ref.base, eo, ref,
                                        [&](double t, const NkgState& s) { probe.observe(t, s.psi); });
  return probe.finish(traj.blowup);
}

}  // namespace hylo

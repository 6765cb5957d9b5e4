#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hylomorph/functionals.hpp"
#include "hylomorph/hylomorphy.hpp"
#include "hylomorph/solver.hpp"

namespace hylo {

struct MonitorSample {
  double t = 0.0;
  double energy = 0.0;
  double charge = 0.0;
  double orbit_distance = 0.0;
  double lyapunov = 0.0;
};

template <class State>
struct Trajectory {
  explicit Trajectory(State initial) : final_state(std::move(initial)) {}

  double dt = 0.0;
  std::vector<double> times;
  std::vector<MonitorSample> monitors;
  std::vector<State> snapshots;  // filled only with keep_snapshots
  State final_state;
  bool blowup = false;
  std::string diagnostic;
};

using NlsTrajectory = Trajectory<Field>;
using NkgTrajectory = Trajectory<NkgState>;

/// Orbit of an invariant profile under global phase and lattice shifts,
/// with the constants the Lyapunov monitor compares against.
struct NlsOrbitReference {
  Field base;
  double omega = 0.0;
  double charge = 0.0;  // sigma, the |C| target
  double energy = 0.0;  // c_sigma
};

struct NkgOrbitReference {
  NkgState base;
  double omega = 0.0;
  double charge = 0.0;
  double energy = 0.0;
};

NlsOrbitReference make_reference(const NlsModel& model, const SolitonResult& result);
NkgOrbitReference make_reference(const NkgModel& model, const SolitonResult& result);

template <class State>
using Observer = std::function<void(double t, const State& state)>;

struct EvolveOptions {
  double dt = 1e-3;
  std::int64_t steps = 0;
  std::int64_t stride = 100;  // monitor/snapshot spacing in steps
  bool keep_snapshots = false;

  void validate() const;
};

/// Strang splitting: half potential/nonlinear phase rotation, exact kinetic
/// step in Fourier space, half rotation. Monitors are taken at t = 0, every
/// `stride` steps and at the final step; without `ref` the orbit reference
/// is the initial state itself.
NlsTrajectory evolve_nls(const NlsModel& model, const Field& psi0, const EvolveOptions& opts,
                         const std::optional<NlsOrbitReference>& ref = std::nullopt,
                         const Observer<Field>& observer = {});

/// Kick-drift-kick Stormer-Verlet on (psi, psi_dot). Throws
/// std::invalid_argument when dt exceeds nkg_cfl_limit().
NkgTrajectory evolve_nkg(const NkgModel& model, const NkgState& state0, const EvolveOptions& opts,
                         const std::optional<NkgOrbitReference>& ref = std::nullopt,
                         const Observer<NkgState>& observer = {});

/// 2 / sqrt(|k|^2_max + max h^2).
double nkg_cfl_limit(const NkgModel& model);

/// Same position, opposite velocity. Verlet run from the reversed state
/// retraces the trajectory.
NkgState reverse_velocity(const NkgState& state);

/// min over theta and lattice shifts z of ||state - e^{i theta} T_z base||
/// in the quadratic norm. Shifts are ranked by |<L state, T_z base>| and the
/// leading few are evaluated exactly.
double orbit_distance(const NlsModel& model, const Field& base, const Field& state);
double orbit_distance(const NkgModel& model, const NkgState& base, const NkgState& state);

/// (E - c_sigma)^2 + (|C| - sigma)^2.
double lyapunov(const NlsModel& model, const Field& state, double sigma, double c_sigma);
double lyapunov(const NkgModel& model, const NkgState& state, double sigma, double c_sigma);

/// Smooth complex noise: Gaussian Fourier coefficients on the modes with
/// |k| at most `fraction` of the largest wavenumber, unit L2 norm.
Field band_limited_noise(const Grid& grid, std::uint64_t seed, double fraction = 0.25);

struct StabilityOptions {
  double delta = 1e-2;  // perturbation size relative to ||psi0||
  double horizon = 20.0;
  double dt = 1e-3;
  std::int64_t stride = 100;
  std::uint64_t seed = 0;
};

struct CellSample {
  double t = 0.0;
  BestCell cell;
};

struct StabilityReport {
  double reference_norm = 0.0;  // ||psi0|| in the quadratic norm
  double initial_distance = 0.0;
  double max_orbit_distance = 0.0;
  double max_relative_distance = 0.0;  // max_orbit_distance / reference_norm
  double initial_lyapunov = 0.0;
  double max_lyapunov = 0.0;
  std::vector<CellSample> cell_track;
  bool blowup = false;
  std::string diagnostic;
};

/// Perturbs the minimizer by delta * ||psi0|| times unit band-limited noise,
/// rescales to charge sigma, and evolves to the horizon. A blowup ends the
/// run and is reported, not thrown.
StabilityReport stability_experiment(const NlsModel& model, const SolitonResult& result,
                                     const StabilityOptions& opts, NlsTrajectory* trajectory = nullptr);
StabilityReport stability_experiment(const NkgModel& model, const SolitonResult& result,
                                     const StabilityOptions& opts, NkgTrajectory* trajectory = nullptr);

struct StandingWaveReport {
  double omega = 0.0;
  double phase_rate = 0.0;  // least-squares slope of -arg <psi(t), psi0>
  double phase_rate_error = 0.0;  // |phase_rate - omega| / |omega|
  double max_modulus_deviation = 0.0;  // || |psi(t)| - |psi0| || / ||psi0||
  double max_tracking_error = 0.0;  // || psi(t) - psi0 e^{-i omega t} || / ||psi0||
  bool blowup = false;
};

/// Accumulates the standing-wave comparison against psi0 e^{-i omega t}
/// from states observed along a trajectory.
class StandingWaveProbe {
 public:
  StandingWaveProbe(const Field& psi0, double omega);
  void observe(double t, const Field& psi);
  // phase_rate_error is NaN when omega = 0.
  StandingWaveReport finish(bool blowup) const;

 private:
  Field psi0_;
  double omega_;
  double norm0_;
  std::vector<double> mod0_;
  std::vector<double> times_;
  std::vector<double> phases_;
  StandingWaveReport report_;
};

/// Evolves the minimizer and compares it against psi0 e^{-i omega t};
/// samples every `sample_stride` steps.
StandingWaveReport standing_wave_check(const NlsModel& model, const SolitonResult& result,
                                       double horizon, double dt, std::int64_t sample_stride = 10);
StandingWaveReport standing_wave_check(const NkgModel& model, const SolitonResult& result,
                                       double horizon, double dt, std::int64_t sample_stride = 10);

}  // namespace hylo

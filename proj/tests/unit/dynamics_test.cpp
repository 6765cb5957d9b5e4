#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "hylomorph/dynamics.hpp"
#include "hylomorph/spectral.hpp"
#include "oracles.hpp"

using namespace hylo;

namespace {

SolverOptions options(double sigma = 4.0) {
  SolverOptions o;
  o.sigma = sigma;
  return o;
}

const SolitonResult& nls_soliton() {
  static const SolitonResult r = minimize_nls(fixtures::reference_nls(), options());
  return r;
}

const SolitonResult& nkg_soliton() {
  static const SolitonResult r = minimize_nkg(fixtures::reference_nkg(), options());
  return r;
}

EvolveOptions steps(std::int64_t n, double dt = 1e-3, std::int64_t stride = 100) {
  EvolveOptions o;
  o.dt = dt;
  o.steps = n;
  o.stride = stride;
  return o;
}

double max_abs_diff(const Field& a, const Field& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a.values[i] - b.values[i]));
  return w;
}

Field perturbed(const Field& u, std::uint64_t seed, double size) {
  Field v = band_limited_noise(u.grid, seed);
  Field out = u;
  for (std::size_t i = 0; i < u.size(); ++i) out.values[i] += size * v.values[i];
  return out;
}

}  // namespace

TEST(EvolveOptions, Validation) {
  EXPECT_THROW(steps(10, 0.0).validate(), std::invalid_argument);
  EXPECT_THROW(steps(-1).validate(), std::invalid_argument);
  EXPECT_THROW(steps(10, 1e-3, 0).validate(), std::invalid_argument);
}

TEST(EvolveNls, ZeroStaysZero) {
  const auto m = fixtures::reference_nls();
  const auto t = evolve_nls(m, Field::zeros(m.grid()), steps(50, 1e-3, 10));
  for (const auto& v : t.final_state.values) EXPECT_EQ(v, Complex(0.0));
  EXPECT_FALSE(t.blowup);
}

TEST(EvolveNls, MonitorsAtStrideAndEnd) {
  const auto m = fixtures::reference_nls();
  const auto t = evolve_nls(m, nls_soliton().profile, steps(250));
  const std::vector<double> expect{0.0, 0.1, 0.2, 0.25};
  ASSERT_EQ(t.times.size(), expect.size());
  ASSERT_EQ(t.monitors.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_NEAR(t.times[i], expect[i], 1e-15);
}

TEST(EvolveNls, PlaneWaveIsExact) {
  const NlsModel m(fixtures::line_grid(8, 16), Potential::zero(), Nonlinearity::quadratic(0.0));
  const double k = 2.0 * std::numbers::pi * 3.0 / m.grid().box_volume();
  auto wave = [&](double t) {
    return sample_profile(m.grid(), [&](const Point& x) { return std::polar(1.0, k * x[0] - 0.5 * k * k * t); });
  };
  const double dt = 1e-2;
  Field psi = wave(0.0);
  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) {
    psi = evolve_nls(m, psi, steps(1, dt, 1)).final_state;
    worst = std::max(worst, max_abs_diff(psi, wave(n * dt)) / n);
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(EvolveNls, StandingWave) {
  const auto r = standing_wave_check(fixtures::reference_nls(), nls_soliton(), 10.0, 1e-3);
  EXPECT_FALSE(r.blowup);
  EXPECT_LE(r.max_modulus_deviation, 1e-3);
  EXPECT_LE(r.phase_rate_error, 0.01);
  EXPECT_NEAR(r.omega, nls_soliton().omega, 0.0);
}

TEST(EvolveNls, ConservesChargeAndEnergy) {
  const auto m = fixtures::reference_nls();
  const Field psi0 = perturbed(nls_soliton().profile, 3, 0.05);
  const auto t = evolve_nls(m, psi0, steps(10000, 1e-3, 1000));
  const double e0 = t.monitors.front().energy, c0 = t.monitors.front().charge;
  for (const auto& s : t.monitors) {
    EXPECT_LE(std::abs(s.charge - c0), 1e-12 * c0);
    EXPECT_LE(std::abs(s.energy - e0), 1e-6 * std::abs(e0));
  }
}

TEST(EvolveNls, LyapunovDriftIsSmall) {
  const auto m = fixtures::reference_nls();
  const SolitonResult& r = nls_soliton();
  const Field psi0 = perturbed(r.profile, 4, 0.02);
  const auto ref = make_reference(m, r);
  const auto t = evolve_nls(m, psi0, steps(10000, 1e-3, 500), ref);
  for (const auto& s : t.monitors) EXPECT_LE(std::abs(s.lyapunov - t.monitors.front().lyapunov), 1e-8);
}

TEST(EvolveNkg, HarmonicOscillator) {
  const NkgModel m(fixtures::line_grid(4, 8), Nonlinearity::quadratic(1.0));
  const Field one(m.grid(), std::vector<Complex>(m.grid().size(), Complex(1.0, 0.0)));
  double worst = 0.0;
  const auto n = static_cast<std::int64_t>(std::ceil(2.0 * std::numbers::pi / 1e-3));
  evolve_nkg(m, NkgState(one, Field::zeros(m.grid())), steps(n, 1e-3, 1), std::nullopt,
             [&](double t, const NkgState& s) { worst = std::max(worst, std::abs(s.psi.values[5] - std::cos(t))); });
  EXPECT_LE(worst, 1e-4);
}

TEST(EvolveNkg, CflIsEnforced) {
  const auto m = fixtures::reference_nkg();
  const double limit = nkg_cfl_limit(m);
  EXPECT_NEAR(limit, 2.0 / std::sqrt(m.grid().spectral().k_squared_max() + 1.21), 1e-12);
  const NkgState s = nkg_soliton().nkg_state();
  EXPECT_THROW(evolve_nkg(m, s, steps(1, 1.01 * limit)), std::invalid_argument);
  EXPECT_NO_THROW(evolve_nkg(m, s, steps(1, 0.99 * limit)));
}

TEST(EvolveNkg, TimeReversible) {
  const auto m = fixtures::reference_nkg();
  const NkgState s0(perturbed(nkg_soliton().profile, 8, 0.05), *nkg_soliton().profile_dot);
  const auto fwd = evolve_nkg(m, s0, steps(500, 1e-3));
  const auto back = evolve_nkg(m, reverse_velocity(fwd.final_state), steps(500, 1e-3));
  const NkgState end = reverse_velocity(back.final_state);
  EXPECT_LE(max_abs_diff(end.psi, s0.psi), 1e-10);
  EXPECT_LE(max_abs_diff(end.psi_dot, s0.psi_dot), 1e-10);
}

TEST(EvolveNkg, ConservationAtTenthCfl) {
  const auto m = fixtures::reference_nkg();
  const double dt = 0.1 * nkg_cfl_limit(m);
  const NkgState s0(perturbed(nkg_soliton().profile, 5, 0.05), *nkg_soliton().profile_dot);
  const auto t = evolve_nkg(m, s0, steps(10000, dt, 10));
  const double e0 = t.monitors.front().energy, c0 = t.monitors.front().charge;
  std::vector<double> e;
  for (const auto& s : t.monitors) {
    EXPECT_LE(std::abs(s.charge - c0), 1e-6 * std::abs(c0));
    // Leapfrog energy oscillates at O(dt^2) but must stay bounded.
    EXPECT_LE(std::abs(s.energy - e0), 1e-3 * std::abs(e0));
    e.push_back(s.energy);
  }
  EXPECT_LE(oracle::window_drift(e), 1e-5);
}

TEST(EvolveNkg, StandingWaveTracking) {
  const auto r = standing_wave_check(fixtures::reference_nkg(), nkg_soliton(), 10.0, 1e-3);
  EXPECT_FALSE(r.blowup);
  EXPECT_LE(r.max_tracking_error, 1e-3);
  EXPECT_LE(r.max_modulus_deviation, 1e-3);
  EXPECT_LE(r.phase_rate_error, 0.01);
}

TEST(EvolveNkg, BlowupIsReportedNotThrown) {
  const auto m = fixtures::reference_nkg();
  const Field big(m.grid(), std::vector<Complex>(m.grid().size(), Complex(10.0, 0.0)));
  const double dt = 0.9 * nkg_cfl_limit(m);
  NkgTrajectory t(NkgState(big, Field::zeros(m.grid())));
  ASSERT_NO_THROW(t = evolve_nkg(m, NkgState(big, Field::zeros(m.grid())), steps(2000, dt, 10)));
  EXPECT_TRUE(t.blowup);
  EXPECT_FALSE(t.diagnostic.empty());
}

TEST(OrbitDistance, ZeroOnTheOrbit) {
  const auto m = fixtures::reference_nls();
  const Field& u = nls_soliton().profile;
  EXPECT_LE(orbit_distance(m, u, u), 1e-12);
  Field moved = translate(u, {5, 0, 0});
  for (auto& v : moved.values) v *= std::polar(1.0, 0.7);
  EXPECT_LE(orbit_distance(m, u, moved), 1e-12);

  const auto k = fixtures::reference_nkg();
  const NkgState s = nkg_soliton().nkg_state();
  NkgState ms = translate(s, {-3, 0, 0});
  for (auto* f : {&ms.psi, &ms.psi_dot})
    for (auto& v : f->values) v *= std::polar(1.0, 0.7);
  EXPECT_LE(orbit_distance(k, s, ms), 1e-12);
}

TEST(OrbitDistance, FeasiblePointBound) {
  const auto m = fixtures::reference_nls();
  const Field& u = nls_soliton().profile;
  Field v = band_limited_noise(m.grid(), 12);
  const double q = std::sqrt(quadratic_norm(m, v));
  for (auto& c : v.values) c /= q;
  for (double delta : {1e-3, 1e-1}) {
    Field w = u;
    for (std::size_t i = 0; i < w.size(); ++i) w.values[i] += delta * v.values[i];
    EXPECT_LE(orbit_distance(m, u, w), delta * (1.0 + 1e-12));
  }
}

TEST(OrbitDistance, SymmetricModuloSymmetry) {
  const auto m = fixtures::reference_nls();
  const Field& u = nls_soliton().profile;
  const Field w = translate(perturbed(u, 6, 0.3), {2, 0, 0});
  EXPECT_NEAR(orbit_distance(m, u, w), orbit_distance(m, w, u), 1e-12);
}

TEST(Lyapunov, ZeroAtMinimizerAndInvariant) {
  const auto m = fixtures::reference_nls();
  const SolitonResult& r = nls_soliton();
  EXPECT_LE(lyapunov(m, r.profile, r.charge, r.energy), 1e-12);
  const Field u = perturbed(r.profile, 2, 0.2);
  const double v = lyapunov(m, u, r.charge, r.energy);
  EXPECT_GT(v, 0.0);
  Field w = translate(u, {7, 0, 0});
  for (auto& c : w.values) c *= std::polar(1.0, -1.3);
  EXPECT_TRUE(oracle::close_rel(lyapunov(m, w, r.charge, r.energy), v, 1e-12));

  const auto k = fixtures::reference_nkg();
  const SolitonResult& s = nkg_soliton();
  EXPECT_LE(lyapunov(k, s.nkg_state(), std::abs(s.charge), s.energy), 1e-12);
}

TEST(Noise, BandLimitedAndNormalized) {
  const Grid g = fixtures::line_grid(16, 64);
  const Field n = band_limited_noise(g, 42);
  EXPECT_NEAR(l2_norm(n), 1.0, 1e-13);
  std::vector<Complex> hat(g.size());
  g.spectral().forward(n.values, hat);
  const double cut = 0.0625 * g.spectral().k_squared_max();
  for (std::size_t i = 0; i < hat.size(); ++i)
    if (g.spectral().k_squared()[i] > cut * (1.0 + 1e-12)) EXPECT_LT(std::abs(hat[i]), 1e-10);
  EXPECT_EQ(band_limited_noise(g, 42).values, n.values);
}

TEST(Stability, BaselineAndPerturbed) {
  const auto m = fixtures::reference_nls();
  StabilityOptions o;
  o.delta = 0.0;
  const auto base = stability_experiment(m, nls_soliton(), o);
  EXPECT_LE(base.max_orbit_distance, 1e-3);
  o.delta = 1e-2;
  const auto rep = stability_experiment(m, nls_soliton(), o);
  EXPECT_FALSE(rep.blowup);
  EXPECT_LE(rep.max_orbit_distance, 10.0 * o.delta);
  EXPECT_LE(rep.max_relative_distance, 10.0 * o.delta);
  EXPECT_LE(rep.max_lyapunov, 10.0 * rep.initial_lyapunov);
  EXPECT_FALSE(rep.cell_track.empty());
}

TEST(Stability, RequiresConvergedMinimizer) {
  SolitonResult r = nls_soliton();
  r.converged = false;
  EXPECT_THROW(stability_experiment(fixtures::reference_nls(), r, StabilityOptions{}), std::invalid_argument);
}

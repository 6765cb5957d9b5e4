#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "hylomorph/functionals.hpp"
#include "hylomorph/errors.hpp"
#include "oracles.hpp"

using namespace hylo;

namespace {

Field constant(const Grid& g, Complex c) { return Field(g, std::vector<Complex>(g.size(), c)); }

NkgState smooth_state(const Grid& g, std::uint64_t seed) {
  return NkgState(fixtures::smooth_field(g, seed, 1.5), fixtures::smooth_field(g, seed + 100, 0.8));
}

double value_sum(const Grid& g, const FunctionalValue& f) {
  double s = 0.0;
  for (double d : f.density) s += d;
  return s * g.weight();
}

}  // namespace

TEST(Nonlinearity, PositivityBound) {
  EXPECT_NO_THROW(Nonlinearity::quartic_sextic(1.0, 1.0, 0.25));
  EXPECT_NO_THROW(Nonlinearity::quartic_sextic(2.0, 1.0, 3.0 / 64.0));
  EXPECT_NO_THROW(Nonlinearity::quartic_sextic(1.0, 1.0, 3.0 / 16.0));
  EXPECT_THROW(Nonlinearity::quartic_sextic(1.0, 1.0, 0.18), std::invalid_argument);
  EXPECT_THROW(Nonlinearity::quartic_sextic(1.0, -1.0, 1.0), std::invalid_argument);
}

TEST(Nonlinearity, ValuesAndDerivative) {
  const auto w = fixtures::reference_w();
  for (double s : {0.0, 0.3, 1.0, 1.7, 2.9}) {
    EXPECT_NEAR(w.value(s), oracle::quartic_sextic(s, 1.0, 1.0, 0.25), 1e-14);
    EXPECT_GE(w.value(s), 0.0);
    if (s > 0.0) {
      const double fd = oracle::central_difference([&](double e) { return w.value(s + e); }, 1e-6);
      EXPECT_NEAR(w.derivative_over_s(s) * s, fd, 1e-7);
    }
  }
  EXPECT_DOUBLE_EQ(w.derivative_over_s(0.0), 1.0);
}

TEST(Potential, LatticePeriodicAndBounded) {
  const Grid g = fixtures::line_grid(4, 16);
  const auto v = Potential::cosine(0.3).sample(g);
  for (std::size_t p = 0; p < g.size(); ++p) {
    EXPECT_GE(v[p], 0.0);
    EXPECT_LE(v[p], 0.3);
    EXPECT_NEAR(v[p], v[(p + 16) % g.size()], 1e-14);
  }
}

TEST(Energy, ZeroField) {
  const auto m = fixtures::reference_nls();
  const Field z = Field::zeros(m.grid());
  EXPECT_EQ(energy(m, z).value, 0.0);
  EXPECT_EQ(charge(m, z).value, 0.0);
  const auto g = first_variation(m, z);
  for (const auto& v : g.energy.values) EXPECT_EQ(v, Complex(0.0));
  for (const auto& v : g.charge.values) EXPECT_EQ(v, Complex(0.0));
}

TEST(Energy, GaussianClosedForm) {
  // 8 cells of length 2 centred on the origin cover [-8, 8].
  const NlsModel m(fixtures::line_grid(8, 32), Potential::zero(), Nonlinearity::quadratic(1.0));
  const Field u = [&] {
    std::vector<Complex> v(m.grid().size());
    const Point c = m.grid().box_center();
    for (std::size_t p = 0; p < v.size(); ++p) {
      const double x = m.grid().displacement(p, c)[0];
      v[p] = std::exp(-x * x);
    }
    return Field(m.grid(), v);
  }();
  // 1/2 int u'^2 + 1/2 int u^2 = 1/2 sqrt(pi/2) + 1/2 sqrt(pi/2)
  EXPECT_NEAR(energy(m, u).value, std::sqrt(std::numbers::pi / 2.0), 1e-6);
}

TEST(Energy, MatchesDenseDftOracle) {
  const NlsModel m(fixtures::line_grid(4, 16), Potential::cosine(0.2), fixtures::reference_w());
  const Field u = fixtures::smooth_field(m.grid(), 5, 2.0);
  const oracle::Periodic1d line{m.grid().size(), m.grid().box_volume()};
  const double ref = oracle::nls_energy(line, u.values, 2.0, 0.2, 1.0, 1.0, 0.25);
  EXPECT_NEAR(energy(m, u).value, ref, 1e-12 * std::abs(ref));
}

TEST(Energy, DensityIntegratesToValue) {
  const auto nls = fixtures::reference_nls();
  const auto nkg = fixtures::reference_nkg();
  const Field u = fixtures::smooth_field(nls.grid(), 3, 2.0);
  const auto e = energy(nls, u);
  EXPECT_NEAR(value_sum(nls.grid(), e), e.value, 1e-13 * e.value);
  const auto s = smooth_state(nkg.grid(), 4);
  const auto c = charge(nkg, s);
  EXPECT_NEAR(value_sum(nkg.grid(), c), c.value, 1e-13 * std::abs(c.value));
}

TEST(Charge, ConstantField) {
  const NlsModel m(fixtures::line_grid(4, 8), Potential::zero(), Nonlinearity::quadratic(1.0));
  const Complex c{0.6, -0.8};
  EXPECT_NEAR(charge(m, constant(m.grid(), c)).value, std::norm(c) * m.grid().box_volume(), 1e-13);
}

TEST(Charge, NkgStandingWaveAnsatz) {
  const auto m = fixtures::reference_nkg();
  const Field psi = fixtures::smooth_field(m.grid(), 8, 1.3);
  const double omega = 0.7;
  Field pd = psi;
  for (auto& v : pd.values) v *= Complex(0.0, -omega);
  const double rho = real_inner(psi, psi);
  EXPECT_NEAR(charge(m, NkgState(psi, pd)).value, -omega * rho, 1e-13 * rho);
}

TEST(FirstVariation, NlsCentralDifferences) {
  const auto m = fixtures::reference_nls();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Field u = fixtures::smooth_field(m.grid(), seed, 2.0);
    const Field v = fixtures::smooth_field(m.grid(), seed + 50, 1.0);
    const auto g = first_variation(m, u);
    auto shifted = [&](double e) {
      Field w = u;
      for (std::size_t i = 0; i < w.size(); ++i) w.values[i] += e * v.values[i];
      return w;
    };
    const double fd_e =
        oracle::central_difference([&](double e) { return energy(m, shifted(e)).value; }, 1e-5);
    const double fd_c =
        oracle::central_difference([&](double e) { return charge(m, shifted(e)).value; }, 1e-5);
    EXPECT_NEAR(real_inner(g.energy, v), fd_e, 1e-5 * (1.0 + energy(m, u).value));
    EXPECT_NEAR(real_inner(g.charge, v), fd_c, 1e-8 * (1.0 + std::abs(fd_c)));
  }
}

TEST(FirstVariation, NkgCentralDifferences) {
  const auto m = fixtures::reference_nkg();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NkgState u = smooth_state(m.grid(), seed);
    const NkgState v = smooth_state(m.grid(), seed + 7);
    const auto g = first_variation(m, u);
    auto shifted = [&](double e) {
      NkgState w = u;
      for (std::size_t i = 0; i < w.psi.size(); ++i) {
        w.psi.values[i] += e * v.psi.values[i];
        w.psi_dot.values[i] += e * v.psi_dot.values[i];
      }
      return w;
    };
    const double fd_e =
        oracle::central_difference([&](double e) { return energy(m, shifted(e)).value; }, 1e-5);
    const double fd_c =
        oracle::central_difference([&](double e) { return charge(m, shifted(e)).value; }, 1e-5);
    EXPECT_NEAR(real_inner(g.energy, v), fd_e, 1e-5 * (1.0 + energy(m, u).value));
    EXPECT_NEAR(real_inner(g.charge, v), fd_c, 1e-8 * (1.0 + std::abs(fd_c)));
  }
}

TEST(FirstVariation, NkgVelocityComponentVanishesOnAnsatz) {
  const auto m = fixtures::reference_nkg();
  const Field psi = fixtures::smooth_field(m.grid(), 21, 1.0);
  const double omega = 0.8;
  Field pd = psi;
  for (auto& v : pd.values) v *= Complex(0.0, -omega);
  const auto g = first_variation(m, NkgState(psi, pd));
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i)
    worst = std::max(worst, std::abs(g.energy.psi_dot.values[i] + omega * g.charge.psi_dot.values[i]));
  EXPECT_LT(worst, 1e-14);
}

TEST(Ratio, ConstantFieldQuadratic) {
  const NlsModel m(fixtures::line_grid(4, 8), Potential::zero(), Nonlinearity::quadratic(1.0));
  EXPECT_NEAR(hylomorphy_ratio(m, constant(m.grid(), {0.3, 0.4})), 0.5, 1e-14);
}

TEST(Ratio, ZeroChargeThrows) {
  const auto m = fixtures::reference_nls();
  EXPECT_THROW(hylomorphy_ratio(m, Field::zeros(m.grid())), std::domain_error);
  const auto k = fixtures::reference_nkg();
  const Field psi = fixtures::smooth_field(k.grid(), 1);
  EXPECT_THROW(hylomorphy_ratio(k, NkgState(psi, Field::zeros(k.grid()))), std::domain_error);
}

TEST(QuadraticNorm, ConstantAndZero) {
  const NlsModel m(fixtures::line_grid(4, 8), Potential::zero(), Nonlinearity::quadratic(1.0));
  EXPECT_EQ(quadratic_norm(m, Field::zeros(m.grid())), 0.0);
  EXPECT_NEAR(quadratic_norm(m, constant(m.grid(), {0.0, 2.0})), 4.0 * m.grid().box_volume(), 1e-12);
}

TEST(QuadraticNorm, EnergySplitsIntoNormAndHigherOrder) {
  const auto nls = fixtures::reference_nls();
  const auto nkg = fixtures::reference_nkg();
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Field u = fixtures::smooth_field(nls.grid(), seed, 3.0);
    const double e = energy(nls, u).value;
    EXPECT_NEAR(e, 0.5 * quadratic_norm(nls, u) + higher_order_part(nls, u), 1e-12 * std::abs(e));
    const NkgState s = smooth_state(nkg.grid(), seed);
    const double f = energy(nkg, s).value;
    EXPECT_NEAR(f, 0.5 * quadratic_norm(nkg, s) + higher_order_part(nkg, s), 1e-12 * std::abs(f));
  }
}

TEST(QuadraticNorm, HigherOrderIsSuperquadratic) {
  const auto m = fixtures::reference_nls();
  const Field u = fixtures::smooth_field(m.grid(), 2, 2.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    Field w = u;
    for (auto& v : w.values) v *= eps;
    const double ratio = std::abs(higher_order_part(m, w)) / (eps * eps);
    EXPECT_LT(ratio, prev);
    prev = ratio;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(Functionals, Positivity) {
  const auto nls = fixtures::reference_nls();
  const auto nkg = fixtures::reference_nkg();
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    EXPECT_GT(energy(nls, fixtures::smooth_field(nls.grid(), seed, 4.0)).value, 0.0);
    EXPECT_GT(energy(nkg, smooth_state(nkg.grid(), seed)).value, 0.0);
  }
}

TEST(Functionals, TranslationInvariance) {
  const auto nls = fixtures::reference_nls();
  const auto nkg = fixtures::reference_nkg();
  const Field u = fixtures::smooth_field(nls.grid(), 31, 2.0);
  const NkgState s = smooth_state(nkg.grid(), 32);
  for (std::int64_t z : {1, 5, -3, 16}) {
    const Field tu = translate(u, {z, 0, 0});
    EXPECT_TRUE(oracle::close_rel(energy(nls, tu).value, energy(nls, u).value, 1e-12));
    EXPECT_TRUE(oracle::close_rel(charge(nls, tu).value, charge(nls, u).value, 1e-12));
    EXPECT_TRUE(oracle::close_rel(quadratic_norm(nls, tu), quadratic_norm(nls, u), 1e-12));
    EXPECT_TRUE(oracle::close_rel(hylomorphy_ratio(nls, tu), hylomorphy_ratio(nls, u), 1e-12));
    const NkgState ts = translate(s, {z, 0, 0});
    EXPECT_TRUE(oracle::close_rel(energy(nkg, ts).value, energy(nkg, s).value, 1e-12));
    EXPECT_TRUE(oracle::close_rel(charge(nkg, ts).value, charge(nkg, s).value, 1e-12));
  }
}

TEST(Functionals, GridMismatch) {
  const auto m = fixtures::reference_nls();
  EXPECT_THROW(energy(m, Field::zeros(fixtures::line_grid(4, 8))), GridMismatch);
}

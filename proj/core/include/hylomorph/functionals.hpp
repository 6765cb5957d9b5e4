#pragma once

#include <string>
#include <vector>

#include "hylomorph/lattice.hpp"

namespace hylo {

enum class NonlinearityFamily { Quadratic, QuarticSextic };

/// W(s) = h^2 s^2 / 2 + N(s) with s = |u|. The quartic-sextic family has
/// N(s) = -(a/4) s^4 + (b/6) s^6; the quadratic family has N = 0.
class Nonlinearity {
 public:
  static Nonlinearity quadratic(double h);
  /// Throws std::invalid_argument unless h, a, b > 0 and W >= 0, which for
  /// this family means b >= 3 a^2 / (16 h^2).
  static Nonlinearity quartic_sextic(double h, double a, double b);

  NonlinearityFamily family() const noexcept { return family_; }
  std::string family_name() const;
  double h() const noexcept { return h_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

  double value(double s) const noexcept;              // W(s)
  double higher_order(double s) const noexcept;       // N(s)
  // F'(s)/s, so that W'(u) = derivative_over_s(|u|) * u. Finite at s = 0.
  double derivative_over_s(double s) const noexcept;
  double higher_order_derivative_over_s(double s) const noexcept;
  // Positive root of N, or 0 when N has none.
  double root_scale() const noexcept;

 private:
  NonlinearityFamily family_ = NonlinearityFamily::Quadratic;
  double h_ = 1.0;
  double a_ = 0.0;
  double b_ = 0.0;
};

enum class PotentialFamily { Zero, Cosine };

/// V(x) = v0 * prod_i (1 + cos(2 pi (A^{-1}x)_i)) / 2.
class Potential {
 public:
  static Potential zero() { return Potential(); }
  static Potential cosine(double v0);

  PotentialFamily family() const noexcept { return family_; }
  std::string family_name() const;
  double amplitude() const noexcept { return v0_; }
  // Analytic sup norm, not the max over samples.
  double sup_norm() const noexcept { return v0_; }
  std::vector<double> sample(const Grid& grid) const;

 private:
  PotentialFamily family_ = PotentialFamily::Zero;
  double v0_ = 0.0;
};

/// i psi_t = -1/2 Lap psi + V psi + 1/2 W'(psi) on a periodic box.
class NlsModel {
 public:
  NlsModel(Grid grid, Potential potential, Nonlinearity nonlinearity);

  const Grid& grid() const noexcept { return grid_; }
  const Potential& potential() const noexcept { return potential_; }
  const Nonlinearity& nonlinearity() const noexcept { return nonlinearity_; }
  const std::vector<double>& potential_samples() const noexcept { return v_; }

 private:
  Grid grid_;
  Potential potential_;
  Nonlinearity nonlinearity_;
  std::vector<double> v_;
};

/// psi_tt - Lap psi + W'(x, psi) = 0 with W(x,s) = h(x)^2 s^2/2 + N(s) and
/// h(x) = h + mass_amplitude * prod_i (1 + cos(2 pi q_i)) / 2.
class NkgModel {
 public:
  NkgModel(Grid grid, Nonlinearity nonlinearity, double mass_amplitude = 0.0);

  const Grid& grid() const noexcept { return grid_; }
  const Nonlinearity& nonlinearity() const noexcept { return nonlinearity_; }
  double mass_amplitude() const noexcept { return mass_amplitude_; }
  const std::vector<double>& mass_samples() const noexcept { return h_; }
  double h0() const noexcept { return h0_; }
  double h_max() const noexcept { return h_max_; }

 private:
  Grid grid_;
  Nonlinearity nonlinearity_;
  double mass_amplitude_;
  std::vector<double> h_;
  double h0_ = 0.0;
  double h_max_ = 0.0;
};

struct FunctionalValue {
  double value = 0.0;
  std::vector<double> density;
};

FunctionalValue energy(const NlsModel& model, const Field& u);
FunctionalValue energy(const NkgModel& model, const NkgState& u);
FunctionalValue charge(const NlsModel& model, const Field& u);
FunctionalValue charge(const NkgModel& model, const NkgState& u);

/// K(u) = integral of N(|psi|).
double higher_order_part(const NlsModel& model, const Field& u);
double higher_order_part(const NkgModel& model, const NkgState& u);

/// Fréchet derivatives with respect to the real pairing real_inner().
struct NlsVariation {
  Field energy;
  Field charge;
};
struct NkgVariation {
  NkgState energy;
  NkgState charge;
};

NlsVariation first_variation(const NlsModel& model, const Field& u);
NkgVariation first_variation(const NkgModel& model, const NkgState& u);

/// Lambda = E / |C|. Throws std::domain_error at zero charge.
double hylomorphy_ratio(const NlsModel& model, const Field& u);
double hylomorphy_ratio(const NkgModel& model, const NkgState& u);

/// ||u||^2 = <L u, u>, the quadratic part of 2E.
double quadratic_norm(const NlsModel& model, const Field& u);
double quadratic_norm(const NkgModel& model, const NkgState& u);

/// L u itself, used for inner products in the quadratic norm.
Field apply_quadratic_operator(const NlsModel& model, const Field& u);
NkgState apply_quadratic_operator(const NkgModel& model, const NkgState& u);

/// Pointwise |grad u|^2, without the quadrature weight.
std::vector<double> gradient_density(const Field& u);

}  // namespace hylo

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "hylomorph/lattice.hpp"

namespace hylo {

/// Fourier differentiation on a periodic grid. Wavevectors account for a
/// general (non-orthogonal) lattice: k = 2*pi*A^{-T} (kappa / m).
///
/// Every mode, Nyquist included, keeps its signed wavevector, so for complex
/// fields sum_x |grad u|^2 equals the Parseval sum of |k|^2 |u_k|^2 exactly
/// and -Laplacian is the operator with eigenvalues |k|^2.
class SpectralOps {
 public:
  SpectralOps(const Index& shape, int dim, const LatticeSpec& lattice, const Index& cells);
  ~SpectralOps();
  SpectralOps(const SpectralOps&) = delete;
  SpectralOps& operator=(const SpectralOps&) = delete;

  std::size_t size() const noexcept { return size_; }
  // Unnormalized forward DFT.
  void forward(std::span<const Complex> in, std::span<Complex> out) const;
  // Inverse DFT including the 1/P factor.
  void backward(std::span<const Complex> in, std::span<Complex> out) const;

  std::span<const double> k_squared() const noexcept { return k2_; }
  // Component `axis` of the physical wavevector for each mode.
  std::span<const double> k_component(int axis) const noexcept;
  double k_squared_max() const noexcept { return k2_max_; }

  void neg_laplacian(std::span<const Complex> in, std::span<Complex> out) const;
  // d/dx_axis in physical coordinates.
  void derivative(std::span<const Complex> in, int axis, std::span<Complex> out) const;
  // out = IFFT(multiplier(|k|^2) * FFT(in)).
  template <class Fn>
  void apply_symbol(std::span<const Complex> in, std::span<Complex> out, Fn&& multiplier) const {
    std::vector<Complex> hat(size_);
    forward(in, hat);
    for (std::size_t i = 0; i < size_; ++i) hat[i] *= multiplier(k2_[i]);
    backward(hat, out);
  }

 private:
  std::size_t size_;
  int dim_;
  std::vector<double> k2_;
  std::vector<std::vector<double>> k_;
  double k2_max_ = 0.0;
  void* plan_forward_ = nullptr;
  void* plan_backward_ = nullptr;
};

}  // namespace hylo

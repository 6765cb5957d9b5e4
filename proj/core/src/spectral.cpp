#include "hylomorph/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace hylo {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

SpectralOps::SpectralOps(const Index& shape, int dim, const LatticeSpec& lattice, const Index& cells)
    : size_(1), dim_(dim), k_(static_cast<std::size_t>(dim)) {
  int n[kMaxDim] = {1, 1, 1};
  for (int i = 0; i < dim; ++i) {
    n[i] = static_cast<int>(shape[i]);
    size_ *= static_cast<std::size_t>(shape[i]);
  }
  k2_.assign(size_, 0.0);
  for (auto& comp : k_) comp.assign(size_, 0.0);

  for (std::size_t p = 0; p < size_; ++p) {
    auto rem = static_cast<std::int64_t>(p);
    std::array<double, kMaxDim> freq{};
    for (int i = kMaxDim - 1; i >= 0; --i) {
      const std::int64_t len = i < dim ? shape[i] : 1;
      std::int64_t kappa = rem % len;
      rem /= len;
      if (kappa >= (len + 1) / 2 && len > 1) kappa -= len;
      if (i < dim) freq[i] = static_cast<double>(kappa) / static_cast<double>(cells[i]);
    }
    double k2 = 0.0;
    for (int r = 0; r < dim; ++r) {
      double kr = 0.0;
      for (int i = 0; i < dim; ++i) kr += lattice.inverse_at(i, r) * freq[i];
      kr *= 2.0 * std::numbers::pi;
      k_[r][p] = kr;
      k2 += kr * kr;
    }
    k2_[p] = k2;
  }
  k2_max_ = *std::max_element(k2_.begin(), k2_.end());

  std::vector<Complex> scratch(size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plan_forward_ = fftw_plan_dft(dim, n, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_backward_ = fftw_plan_dft(dim, n, as_fftw(scratch.data()), as_fftw(scratch.data()),
                                 FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  if (plan_forward_ == nullptr || plan_backward_ == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan");
  }
}

SpectralOps::~SpectralOps() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (plan_forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_forward_));
  if (plan_backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(plan_backward_));
}

std::span<const double> SpectralOps::k_component(int axis) const noexcept {
  return k_[static_cast<std::size_t>(axis)];
}

void SpectralOps::forward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("FFT size mismatch");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  fftw_execute_dft(static_cast<fftw_plan>(plan_forward_), as_fftw(out.data()), as_fftw(out.data()));
}

void SpectralOps::backward(std::span<const Complex> in, std::span<Complex> out) const {
  if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("FFT size mismatch");
  if (in.data() != out.data()) std::copy(in.begin(), in.end(), out.begin());
  fftw_execute_dft(static_cast<fftw_plan>(plan_backward_), as_fftw(out.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (Complex& c : out) c *= scale;
}

void SpectralOps::neg_laplacian(std::span<const Complex> in, std::span<Complex> out) const {
  apply_symbol(in, out, [](double k2) { return k2; });
}

void SpectralOps::derivative(std::span<const Complex> in, int axis, std::span<Complex> out) const {
  std::vector<Complex> hat(size_);
  forward(in, hat);
  const auto& k = k_[static_cast<std::size_t>(axis)];
  for (std::size_t i = 0; i < size_; ++i) hat[i] *= Complex(0.0, k[i]);
  backward(hat, out);
}

}  // namespace hylo

#include "nmstretch/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace nmstretch {
namespace {

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan inverse = nullptr;
};

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

const Plans* plans_for(std::size_t n) {
  static std::map<std::size_t, std::unique_ptr<Plans>> cache;
  std::lock_guard lock(planner_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second.get();

  auto* real = fftw_alloc_real(n);
  auto* cplx = fftw_alloc_complex(n / 2 + 1);
  auto plans = std::make_unique<Plans>();
  const int size = static_cast<int>(n);
  plans->forward = fftw_plan_dft_r2c_1d(size, real, cplx, FFTW_ESTIMATE);
  plans->inverse = fftw_plan_dft_c2r_1d(size, cplx, real, FFTW_ESTIMATE);
  fftw_free(real);
  fftw_free(cplx);
  if (!plans->forward || !plans->inverse) throw std::runtime_error("FFTW planning failed");
  return cache.emplace(n, std::move(plans)).first->second.get();
}

// Aligned per-thread buffers. Plans were created on fftw_malloc'd arrays, so
// the new-array execute functions see the same alignment on every thread.
struct Scratch {
  explicit Scratch(std::size_t n)
      : real(fftw_alloc_real(n)), cplx(fftw_alloc_complex(n / 2 + 1)) {}
  ~Scratch() {
    fftw_free(real);
    fftw_free(cplx);
  }
  Scratch(const Scratch&) = delete;
  Scratch& operator=(const Scratch&) = delete;
  double* real;
  fftw_complex* cplx;
};

Scratch& scratch_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Scratch>> buffers;
  auto& slot = buffers[n];
  if (!slot) slot = std::make_unique<Scratch>(n);
  return *slot;
}

}  // namespace

RealFft::RealFft(std::size_t size) : size_(size), plans_(nullptr) {
  if (size < 2) throw std::invalid_argument("FFT size must be at least 2");
  plans_ = plans_for(size);
}

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  const auto* p = static_cast<const Plans*>(plans_);
  auto& s = scratch_for(size_);
  std::copy_n(in.begin(), size_, s.real);
  fftw_execute_dft_r2c(p->forward, s.real, s.cplx);
  for (std::size_t k = 0; k < bins(); ++k) out[k] = {s.cplx[k][0], s.cplx[k][1]};
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  const auto* p = static_cast<const Plans*>(plans_);
  auto& s = scratch_for(size_);
  for (std::size_t k = 0; k < bins(); ++k) {
    s.cplx[k][0] = in[k].real();
    s.cplx[k][1] = in[k].imag();
  }
  s.cplx[0][1] = 0.0;
  if (size_ % 2 == 0) s.cplx[size_ / 2][1] = 0.0;
  fftw_execute_dft_c2r(p->inverse, s.cplx, s.real);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t n = 0; n < size_; ++n) out[n] = s.real[n] * scale;
}

}  // namespace nmstretch

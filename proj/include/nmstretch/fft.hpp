#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace nmstretch {

/// Real-input FFT of a fixed size backed by FFTW. Plans are cached per size
/// and shared; forward() and inverse() are safe to call from several threads.
class RealFft {
 public:
  explicit RealFft(std::size_t size);

  std::size_t size() const noexcept { return size_; }
  std::size_t bins() const noexcept { return size_ / 2 + 1; }

  /// out[k] = sum_n in[n] exp(-2 pi i k n / size), k in [0, size/2].
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;

  /// Inverse of forward(), including the 1/size factor. The imaginary parts of
  /// the DC and Nyquist bins are ignored (Hermitian symmetry is implied).
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

 private:
  std::size_t size_;
  const void* plans_;
};

}  // namespace nmstretch

#pragma once

#include <complex>
#include <span>

namespace bindcert {

using Complex = std::complex<double>;

/// Unnormalized complex DFT of size n^dim in both directions (FFTW backed).
///
/// Plans are created under a global planner lock, so instances may be built
/// from concurrent sweep workers; execution is reentrant.
class Fft {
public:
    Fft(int dim, int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&& other) noexcept;

    /// out_m = sum_j in_j exp(-2 pi i m.j / n). `in` and `out` must not alias.
    void forward(std::span<const Complex> in, std::span<Complex> out) const;
    /// out_j = sum_m in_m exp(+2 pi i m.j / n). `in` and `out` must not alias.
    void backward(std::span<const Complex> in, std::span<Complex> out) const;

    std::size_t size() const { return size_; }

private:
    void* forward_ = nullptr;
    void* backward_ = nullptr;
    std::size_t size_ = 0;
};

}  // namespace bindcert

#include "bindcert/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

#include "bindcert/errors.hpp"

namespace bindcert {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

}  // namespace

Fft::Fft(int dim, int n) {
    if (dim < 1 || dim > 3 || n < 1) throw DimensionError("unsupported FFT shape");
    int dims[3] = {n, n, n};
    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(n);

    std::lock_guard lock(planner_mutex());
    auto* a = fftw_alloc_complex(size_);
    auto* b = fftw_alloc_complex(size_);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft(dim, dims, a, b, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft(dim, dims, a, b, FFTW_BACKWARD, flags);
    fftw_free(a);
    fftw_free(b);
    if (forward_ == nullptr || backward_ == nullptr) throw NumericError("FFTW planning failed");
}

Fft::~Fft() {
    if (forward_ == nullptr && backward_ == nullptr) return;
    std::lock_guard lock(planner_mutex());
    if (forward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
    if (backward_ != nullptr) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

Fft::Fft(Fft&& other) noexcept
    : forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)),
      size_(other.size_) {}

Fft& Fft::operator=(Fft&& other) noexcept {
    if (this != &other) {
        std::swap(forward_, other.forward_);
        std::swap(backward_, other.backward_);
        std::swap(size_, other.size_);
    }
    return *this;
}

namespace {

void run(void* plan, std::span<const Complex> in, std::span<Complex> out, std::size_t size) {
    if (in.size() != size || out.size() != size) throw DimensionError("FFT buffer size mismatch");
    // FFTW does not modify the input of an out-of-place complex transform.
    auto* src = reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data()));
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_execute_dft(static_cast<fftw_plan>(plan), src, dst);
}

}  // namespace

void Fft::forward(std::span<const Complex> in, std::span<Complex> out) const {
    run(forward_, in, out, size_);
}

void Fft::backward(std::span<const Complex> in, std::span<Complex> out) const {
    run(backward_, in, out, size_);
}

}  // namespace bindcert

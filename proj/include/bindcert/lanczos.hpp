#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bindcert/fft.hpp"

namespace bindcert {

/// y = A x for a Hermitian operator A.
using LinearMap = std::function<void(std::span<const Complex>, std::span<Complex>)>;

struct LanczosOptions {
    double tol = 1e-10;      ///< stop when ||A psi - lambda psi|| <= tol for every wanted pair
    int max_iter = 5000;     ///< operator applications
    int basis_size = 40;     ///< Krylov vectors held before a thick restart
    int keep = 8;            ///< Ritz vectors carried over a restart
    int nev = 1;             ///< wanted eigenpairs (lowest first), at most 2
    std::uint64_t seed = 1;  ///< start vector seed
};

struct EigenPairs {
    std::vector<double> values;
    std::vector<std::vector<Complex>> vectors;
    std::vector<double> residuals;  ///< explicit ||A psi - lambda psi||
    int iterations = 0;
    int restarts = 0;
    bool converged = false;
};

/// Lowest eigenpairs of a Hermitian operator by thick-restart Lanczos with full
/// (twice-iterated Gram-Schmidt) reorthogonalization. The start vector is drawn
/// from a fixed-seed generator unless `start` is given, so runs are reproducible.
EigenPairs lowest_eigenpairs(std::size_t dim, const LinearMap& apply, const LanczosOptions& options,
                             std::span<const Complex> start = {});

/// <x, y> with the conjugate on x, summed in index order.
Complex inner(std::span<const Complex> x, std::span<const Complex> y);
double norm2(std::span<const Complex> x);

/// Rotates the global phase so that the first component of maximal modulus is
/// real and positive.
void normalize_phase(std::span<Complex> v);

}  // namespace bindcert

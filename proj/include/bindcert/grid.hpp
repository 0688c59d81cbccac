#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace bindcert {

/// Periodic box [-L/2, L/2)^d sampled with N points per axis.
///
/// Position lattice: x_j = -L/2 + j L/N, j = 0..N-1.
/// Momentum lattice: k_n = 2 pi n / L, n = -N/2..N/2-1.
/// Flat indices are row-major with the last axis fastest. Momentum-space
/// fields use the centered ordering (n = -N/2 first) on every axis.
class GridSpec {
public:
    GridSpec() = default;
    GridSpec(int dim, double length, int points);

    int dim() const { return dim_; }
    double length() const { return length_; }
    int points() const { return points_; }
    std::size_t size() const { return size_; }
    double spacing() const { return length_ / points_; }
    double momentum_quantum() const;
    double cell_volume() const;

    /// Per-axis lattice indices of a flat index.
    std::array<int, 3> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::array<int, 3>& idx) const;

    double position(int j) const { return -0.5 * length_ + j * spacing(); }
    std::array<double, 3> position_at(std::size_t flat) const;

    /// Signed mode number n in [-N/2, N/2) for centered index c in [0, N).
    int mode_number(int centered) const { return centered - points_ / 2; }
    std::array<double, 3> momentum_at(std::size_t flat_centered) const;
    /// True when any axis sits on the unpaired Nyquist mode n = -N/2.
    bool is_nyquist(std::size_t flat_centered) const;

    /// Same L and at least as many points: the plane-wave space of *this is a
    /// subspace of the finer one.
    bool nested_in(const GridSpec& finer) const;

    bool operator==(const GridSpec&) const = default;

private:
    int dim_ = 1;
    double length_ = 1.0;
    int points_ = 2;
    std::size_t size_ = 2;
};

/// Real scalar field on one of the lattices of a grid.
struct LatticeField {
    GridSpec grid;
    std::vector<double> values;
};

/// Permutes a centered-order momentum field into FFT (0, 1, .., -1) order.
std::vector<double> centered_to_fft_order(const GridSpec& grid, const std::vector<double>& centered);

}  // namespace bindcert

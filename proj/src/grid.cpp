#include "bindcert/grid.hpp"

#include <cmath>
#include <numbers>

#include "bindcert/errors.hpp"

namespace bindcert {

GridSpec::GridSpec(int dim, double length, int points)
    : dim_(dim), length_(length), points_(points) {
    if (dim < 1 || dim > 3) throw DimensionError("grid dimension must be 1, 2 or 3");
    if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("box length must be > 0");
    if (points < 2 || points % 2 != 0) throw DomainError("points per axis must be even and >= 2");
    size_ = 1;
    for (int a = 0; a < dim; ++a) size_ *= static_cast<std::size_t>(points);
}

double GridSpec::momentum_quantum() const { return 2.0 * std::numbers::pi / length_; }

double GridSpec::cell_volume() const { return std::pow(spacing(), dim_); }

std::array<int, 3> GridSpec::unflatten(std::size_t flat) const {
    std::array<int, 3> idx{0, 0, 0};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(points_));
        flat /= static_cast<std::size_t>(points_);
    }
    return idx;
}

std::size_t GridSpec::flatten(const std::array<int, 3>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) {
        const int n = ((idx[static_cast<std::size_t>(a)] % points_) + points_) % points_;
        flat = flat * static_cast<std::size_t>(points_) + static_cast<std::size_t>(n);
    }
    return flat;
}

std::array<double, 3> GridSpec::position_at(std::size_t flat) const {
    const auto idx = unflatten(flat);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = position(idx[static_cast<std::size_t>(a)]);
    return x;
}

std::array<double, 3> GridSpec::momentum_at(std::size_t flat_centered) const {
    const auto idx = unflatten(flat_centered);
    std::array<double, 3> k{0.0, 0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        k[static_cast<std::size_t>(a)] = momentum_quantum() * mode_number(idx[static_cast<std::size_t>(a)]);
    }
    return k;
}

bool GridSpec::is_nyquist(std::size_t flat_centered) const {
    const auto idx = unflatten(flat_centered);
    for (int a = 0; a < dim_; ++a) {
        if (idx[static_cast<std::size_t>(a)] == 0) return true;
    }
    return false;
}

bool GridSpec::nested_in(const GridSpec& finer) const {
    return dim_ == finer.dim_ && length_ == finer.length_ && points_ <= finer.points_;
}

std::vector<double> centered_to_fft_order(const GridSpec& grid, const std::vector<double>& centered) {
    if (centered.size() != grid.size()) throw DimensionError("momentum field does not match grid");
    std::vector<double> out(centered.size());
    const int half = grid.points() / 2;
    for (std::size_t f = 0; f < centered.size(); ++f) {
        auto idx = grid.unflatten(f);
        for (int a = 0; a < grid.dim(); ++a) {
            auto& i = idx[static_cast<std::size_t>(a)];
            i = (i + half) % grid.points();  // centered c <-> mode c - N/2 <-> fft slot
        }
        out[grid.flatten(idx)] = centered[f];
    }
    return out;
}

}  // namespace bindcert

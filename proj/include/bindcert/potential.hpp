#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bindcert/grid.hpp"

namespace bindcert {

/// -Z / sqrt(|x|^2 + eps^2).
struct Coulomb {
    double charge = 1.0;
    std::optional<double> softening;  ///< defaults to one lattice spacing when point-sampled
};
/// -g exp(-mu r_eps) / r_eps with r_eps = sqrt(|x|^2 + eps^2).
struct Yukawa {
    double strength = 1.0;
    double range = 1.0;  ///< screening rate mu
    std::optional<double> softening;
};
/// -V0 exp(-|x|^2 / (2 sigma^2)).
struct GaussianWell {
    double depth = 1.0;
    double width = 1.0;
};
/// -V0 for |x| < R, 0 outside.
struct SquareWell {
    double depth = 1.0;
    double radius = 1.0;
};
/// omega^2 |x|^2 / 2.
struct Harmonic {
    double omega = 1.0;
};
/// V = c everywhere.
struct ConstantPotential {
    double value = 0.0;
};
/// Samples on their own periodic lattice, read back by nearest neighbour.
struct Tabulated {
    GridSpec source;
    std::vector<double> samples;
};

/// How a potential is turned into an operator on the lattice.
enum class Sampling {
    point,         ///< V(x_j); singular kinds are softened
    cell_average,  ///< average of V over the lattice cell around x_j
    spectral,      ///< exact Fourier coefficients; Galerkin product on the doubled lattice
};

std::string to_string(Sampling s);
Sampling sampling_from_string(const std::string& s);

class PotentialSpec {
public:
    using Variant = std::variant<Coulomb, Yukawa, GaussianWell, SquareWell, Harmonic,
                                 ConstantPotential, Tabulated>;

    PotentialSpec() : v_(ConstantPotential{}) {}
    explicit PotentialSpec(Variant v, Sampling sampling = Sampling::point,
                           std::array<double, 3> center = {0.0, 0.0, 0.0});

    const Variant& variant() const { return v_; }
    Sampling sampling() const { return sampling_; }
    const std::array<double, 3>& center() const { return center_; }
    std::string name() const;

    PotentialSpec with_sampling(Sampling s) const;
    PotentialSpec with_center(std::array<double, 3> c) const;

    /// True for the kinds with a point singularity (Coulomb, Yukawa).
    bool singular() const;

    /// Pointwise value at a displacement from the centre. Singular kinds use their
    /// softening (0 when unset) and throw SingularityError at the singularity.
    double at_displacement(std::span<const double> r) const;

    /// Continuum Fourier coefficient int V(x) e^{-i q.(x - c)} dx of the
    /// box-restricted potential; kinds without a closed form throw DomainError.
    double fourier_coefficient(std::span<const double> q, int dim, double box_length) const;

private:
    Variant v_;
    Sampling sampling_ = Sampling::point;
    std::array<double, 3> center_{0.0, 0.0, 0.0};
};

/// Minimum-image displacement x - c in the periodic box.
std::array<double, 3> minimum_image(const GridSpec& grid, const std::array<double, 3>& x,
                                    const std::array<double, 3>& c);

/// V sampled on the position lattice according to the spec's sampling mode.
/// Spectral sampling returns the band-limited Fourier series at the lattice points.
LatticeField potential_on_grid(const PotentialSpec& V, const GridSpec& grid);

/// Band-limited spectral potential on the doubled lattice (2N points per axis),
/// the multiplier used by the dealiased Galerkin product.
LatticeField spectral_potential_doubled(const PotentialSpec& V, const GridSpec& grid);

/// Closed-form integral of 1/|x| over the box [lo, hi] (d = 1, 2, 3). Throws
/// SingularityError in d = 1 when the interval contains the origin.
double coulomb_cell_integral(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi);

/// Tabulated text format: header line "d L N", then N^d values, one per line,
/// row-major with the last axis fastest.
Tabulated read_tabulated(const std::string& path);
void write_tabulated(const std::string& path, const GridSpec& grid, const std::vector<double>& values);
Tabulated parse_tabulated(const std::string& text);

}  // namespace bindcert

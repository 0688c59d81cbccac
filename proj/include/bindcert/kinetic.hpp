#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <variant>

#include "bindcert/bernstein.hpp"
#include "bindcert/grid.hpp"

namespace bindcert {

struct NonRelativistic {
    double mass = 1.0;
};
struct SemiRelativistic {
    double mass = 1.0;
};
struct BernsteinComposed {
    BernsteinFunction B;
};

/// Isotropic dispersion K(k) = kappa(|k|^2). All variants satisfy K(0) = 0,
/// K(k) = K(-k) and K >= 0.
class KineticProfile {
public:
    using Variant = std::variant<NonRelativistic, SemiRelativistic, BernsteinComposed>;

    explicit KineticProfile(Variant v);

    static KineticProfile nonrelativistic(double mass) { return KineticProfile(NonRelativistic{mass}); }
    static KineticProfile semirelativistic(double mass) { return KineticProfile(SemiRelativistic{mass}); }
    static KineticProfile bernstein(BernsteinFunction B) {
        return KineticProfile(BernsteinComposed{std::move(B)});
    }

    const Variant& variant() const { return v_; }
    std::string name() const;

    /// kappa(|k|^2).
    template <typename Real>
    Real of_squared(Real k2) const {
        return std::visit(
            [k2](const auto& p) -> Real {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, NonRelativistic>) {
                    return k2 / (2 * static_cast<Real>(p.mass));
                } else if constexpr (std::is_same_v<T, SemiRelativistic>) {
                    const Real m = p.mass;
                    return k2 / (std::sqrt(k2 + m * m) + m);
                } else {
                    return p.B.value_as(k2);
                }
            },
            v_);
    }

    double at(std::span<const double> k) const;

private:
    Variant v_;
};

/// K(k_n) over the momentum lattice, centered ordering.
LatticeField kinetic_on_grid(const KineticProfile& K, const GridSpec& grid);

struct H3Report {
    double max_margin = 0.0;
    std::array<double, 3> argmax_p{};
    std::array<double, 3> argmax_k{};
    std::size_t pairs = 0;
    bool exhaustive = true;
};

inline constexpr double kH3Tolerance = 1e-12;

/// max over lattice pairs (p, k), Nyquist excluded, of
///     1/2 (K(p+k) + K(p-k) - 2 K(p)) - K(k)
/// with K evaluated off-lattice from its continuum formula. When the number of
/// pairs exceeds `pair_budget` the check covers every on-axis pair plus a
/// seeded random sample, and reports exhaustive = false.
H3Report h3_margin(const KineticProfile& K, const GridSpec& grid,
                   std::size_t pair_budget = std::size_t{1} << 20, std::uint64_t seed = 0x5eed);

}  // namespace bindcert

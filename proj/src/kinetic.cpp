#include "bindcert/kinetic.hpp"

#include <limits>
#include <random>

#include "bindcert/errors.hpp"

namespace bindcert {

KineticProfile::KineticProfile(Variant v) : v_(std::move(v)) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BernsteinComposed>) {
                if (!p.B.vanishes_at_zero()) {
                    throw DomainError("kinetic Bernstein function needs B(0) = 0 (a = 0)");
                }
            } else {
                if (!(p.mass > 0.0)) throw DomainError("kinetic mass must be > 0");
            }
        },
        v_);
}

std::string KineticProfile::name() const {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, NonRelativistic>) return "nonrelativistic";
            else if constexpr (std::is_same_v<T, SemiRelativistic>) return "semirelativistic";
            else return "bernstein";
        },
        v_);
}

double KineticProfile::at(std::span<const double> k) const {
    double k2 = 0.0;
    for (double c : k) k2 += c * c;
    return of_squared(k2);
}

LatticeField kinetic_on_grid(const KineticProfile& K, const GridSpec& grid) {
    LatticeField field{grid, std::vector<double>(grid.size())};
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto k = grid.momentum_at(f);
        field.values[f] = K.at(std::span<const double>(k.data(), static_cast<std::size_t>(grid.dim())));
    }
    return field;
}

namespace {

struct Margin {
    const KineticProfile& K;
    int dim;

    long double operator()(const std::array<double, 3>& p, const std::array<double, 3>& k) const {
        long double up = 0.0L, um = 0.0L, u0 = 0.0L, uk = 0.0L;
        for (int a = 0; a < dim; ++a) {
            const long double pa = p[static_cast<std::size_t>(a)];
            const long double ka = k[static_cast<std::size_t>(a)];
            up += (pa + ka) * (pa + ka);
            um += (pa - ka) * (pa - ka);
            u0 += pa * pa;
            uk += ka * ka;
        }
        return 0.5L * (K.of_squared(up) + K.of_squared(um) - 2.0L * K.of_squared(u0)) -
               K.of_squared(uk);
    }
};

}  // namespace

H3Report h3_margin(const KineticProfile& K, const GridSpec& grid, std::size_t pair_budget,
                   std::uint64_t seed) {
    std::vector<std::size_t> sites;
    sites.reserve(grid.size());
    for (std::size_t f = 0; f < grid.size(); ++f) {
        if (!grid.is_nyquist(f)) sites.push_back(f);
    }
    std::vector<std::array<double, 3>> mom(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) mom[i] = grid.momentum_at(sites[i]);

    const Margin margin{K, grid.dim()};
    H3Report report;
    long double best = -std::numeric_limits<long double>::infinity();
    auto visit = [&](const std::array<double, 3>& p, const std::array<double, 3>& k) {
        const long double m = margin(p, k);
        if (m > best) {
            best = m;
            report.argmax_p = p;
            report.argmax_k = k;
        }
        ++report.pairs;
    };

    const std::size_t n = sites.size();
    if (n <= pair_budget / n) {
        for (const auto& p : mom)
            for (const auto& k : mom) visit(p, k);
    } else {
        report.exhaustive = false;
        // Every pair on the first axis, where the radial profile is sampled densely.
        const double dk = grid.momentum_quantum();
        for (int i = 1; i < grid.points(); ++i) {
            for (int j = 1; j < grid.points(); ++j) {
                visit({dk * grid.mode_number(i), 0.0, 0.0}, {dk * grid.mode_number(j), 0.0, 0.0});
            }
        }
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        while (report.pairs < pair_budget) visit(mom[pick(rng)], mom[pick(rng)]);
    }
    report.max_margin = static_cast<double>(best);
    return report;
}

}  // namespace bindcert

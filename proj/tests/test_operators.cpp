#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>

#include "bindcert/errors.hpp"
#include "bindcert/grid.hpp"
#include "bindcert/kinetic.hpp"
#include "bindcert/onebody.hpp"
#include "bindcert/potential.hpp"
#include "bindcert/random.hpp"

using namespace bindcert;
using std::numbers::pi;

namespace {

double at_point(const LatticeField& f, const std::array<double, 3>& x) {
    for (std::size_t i = 0; i < f.grid.size(); ++i) {
        const auto p = f.grid.position_at(i);
        bool same = true;
        for (int a = 0; a < f.grid.dim(); ++a) same = same && std::abs(p[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)]) < 1e-12;
        if (same) return f.values[i];
    }
    FAIL("point not on the lattice");
    return 0.0;
}

/// Gauss-Legendre rule on [0, 1].
std::vector<std::pair<double, double>> legendre(int n) {
    std::vector<std::pair<double, double>> out;
    for (int i = 1; i <= n; ++i) {
        double x = std::cos(pi * (i - 0.25) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        out.emplace_back(0.5 * (x + 1), 1.0 / ((1 - x * x) * dp * dp));
    }
    return out;
}

KineticProfile random_profile(Rng& rng, int which) {
    if (which == 0) return KineticProfile::nonrelativistic(rng.uniform(0.2, 3.0));
    if (which == 1) return KineticProfile::semirelativistic(rng.uniform(0.2, 3.0));
    std::vector<LevyAtom> atoms(static_cast<std::size_t>(rng.pick(1, 4)));
    for (auto& a : atoms) a = {rng.positive(10.0), rng.positive(10.0)};
    return KineticProfile::bernstein(BernsteinFunction(0.0, rng.uniform(0.0, 1.0), atoms));
}

}  // namespace

TEST_CASE("grid geometry") {
    const GridSpec g(2, 4.0, 8);
    CHECK(g.size() == 64);
    CHECK(g.spacing() == 0.5);
    CHECK(g.position(0) == -2.0);
    CHECK(g.momentum_quantum() == doctest::Approx(pi / 2));
    CHECK(g.mode_number(0) == -4);
    CHECK(g.flatten(g.unflatten(37)) == 37);
    CHECK(g.is_nyquist(0));
    CHECK(GridSpec(2, 4.0, 4).nested_in(g));
    CHECK_FALSE(GridSpec(2, 5.0, 4).nested_in(g));
    CHECK_THROWS_AS(GridSpec(4, 1.0, 8), DimensionError);
    CHECK_THROWS_AS(GridSpec(1, 0.0, 8), DomainError);
    CHECK_THROWS_AS(GridSpec(1, 1.0, 7), DomainError);
}

TEST_CASE("kinetic profiles on the momentum lattice") {
    const GridSpec g(1, 2 * pi, 4);
    const auto K = kinetic_on_grid(KineticProfile::nonrelativistic(1.0), g).values;
    const std::vector<double> expect{2.0, 0.5, 0.0, 0.5};
    for (std::size_t i = 0; i < 4; ++i) CHECK(K[i] == doctest::Approx(expect[i]).epsilon(1e-15));

    const double zero[1] = {0.0};
    CHECK(KineticProfile::semirelativistic(1.0).at(zero) == 0.0);
    const double big[1] = {1e8};
    CHECK(KineticProfile::semirelativistic(1.0).at(big) == doctest::Approx(1e8 - 1).epsilon(1e-15));

    const GridSpec g3(3, 7.0, 8);
    const auto a = kinetic_on_grid(KineticProfile::bernstein(BernsteinFunction(0, 1, {})), g3).values;
    const auto b = kinetic_on_grid(KineticProfile::nonrelativistic(0.5), g3).values;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));

    CHECK_THROWS_AS(KineticProfile::nonrelativistic(0.0), DomainError);
    CHECK_THROWS_AS(KineticProfile::bernstein(BernsteinFunction(1.0, 1.0, {})), DomainError);
}

TEST_CASE("kinetic fields are even under k -> -k away from Nyquist") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const int d = rng.pick(1, 3);
        const GridSpec g(d, rng.uniform(2 * pi, 32 * pi), 2 * rng.pick(2, d == 3 ? 8 : 32));
        const auto K = random_profile(rng, trial % 3);
        const auto f = kinetic_on_grid(K, g).values;
        const int n = g.points();
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(f[i] >= 0.0);
            if (g.is_nyquist(i)) continue;
            auto idx = g.unflatten(i);
            for (int a = 0; a < d; ++a) idx[static_cast<std::size_t>(a)] = n - idx[static_cast<std::size_t>(a)];
            CHECK(f[g.flatten(idx)] == f[i]);
        }
        std::array<int, 3> origin{n / 2, d > 1 ? n / 2 : 0, d > 2 ? n / 2 : 0};
        CHECK(f[g.flatten(origin)] == 0.0);
    }
}

TEST_CASE("(H.3) margins") {
    const GridSpec g(1, 2 * pi, 40);  // |p|, |k| <= 20
    CHECK(std::abs(h3_margin(KineticProfile::nonrelativistic(1.0), g).max_margin) <= 1e-12);
    const auto semi = h3_margin(KineticProfile::semirelativistic(1.0), g);
    CHECK(semi.max_margin <= 1e-12);
    CHECK(semi.exhaustive);
    CHECK(h3_margin(KineticProfile::bernstein(BernsteinFunction(0, 0.3, {{1.0, 2.0}, {5.0, 0.5}})), g).max_margin <=
          kH3Tolerance);

    Rng rng(22);
    for (int trial = 0; trial < 12; ++trial) {
        const int d = rng.pick(1, 3);
        const GridSpec gr(d, rng.uniform(2 * pi, 32 * pi), 2 * rng.pick(4, d == 1 ? 64 : 8));
        CHECK(h3_margin(random_profile(rng, trial % 3), gr).max_margin <= kH3Tolerance);
    }
    CHECK(h3_margin(KineticProfile::bernstein(BernsteinFunction(0, 0, {{1.0, 1.0}})), g).max_margin <= kH3Tolerance);
}

TEST_CASE("potential sampling examples") {
    const GridSpec g1(1, 4.0, 8);
    CHECK(at_point(potential_on_grid(PotentialSpec(Harmonic{1.0}), g1), {0, 0, 0}) == 0.0);
    CHECK(at_point(potential_on_grid(PotentialSpec(SquareWell{1.0, 1.0}), g1), {0.5, 0, 0}) == -1.0);
    CHECK(at_point(potential_on_grid(PotentialSpec(SquareWell{1.0, 1.0}), g1), {1.5, 0, 0}) == 0.0);

    const GridSpec g3(3, 4.0, 8);
    const auto coul = potential_on_grid(PotentialSpec(Coulomb{1.0, 0.1}), g3);
    CHECK(at_point(coul, {0, 0, 0}) == doctest::Approx(-10.0).epsilon(1e-15));
    CHECK_THROWS_AS(potential_on_grid(PotentialSpec(Coulomb{1.0, 0.0}), g3), SingularityError);
    // Default softening is one lattice spacing.
    CHECK(at_point(potential_on_grid(PotentialSpec(Coulomb{1.0, std::nullopt}), g3), {0, 0, 0}) ==
          doctest::Approx(-1.0 / g3.spacing()));
    // Periodic images: the minimum-image displacement is used.
    CHECK(at_point(potential_on_grid(PotentialSpec(Harmonic{1.0}, Sampling::point, {1.5, 0, 0}), g1), {-2.0, 0, 0}) ==
          doctest::Approx(0.5 * 0.25));
}

TEST_CASE("softened Coulomb deepens as the softening shrinks") {
    const double r[3] = {0.3, -0.2, 0.4};
    double previous = 0.0;
    for (double eps : {2.0, 1.0, 0.5, 0.1, 0.01, 0.0}) {
        const double v = PotentialSpec(Coulomb{1.0, eps}).at_displacement(r);
        CHECK(v <= previous);
        previous = v;
    }
}

TEST_CASE("cell averages") {
    // Exact cell average of x^2/2 over [x - h/2, x + h/2] is x^2/2 + h^2/24.
    const GridSpec g(1, 6.0, 12);
    const auto avg = potential_on_grid(PotentialSpec(Harmonic{1.0}, Sampling::cell_average), g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double x = g.position(static_cast<int>(i));
        CHECK(avg.values[i] == doctest::Approx(0.5 * x * x + g.spacing() * g.spacing() / 24).epsilon(1e-13));
    }
    // Cell average of -1/r over the cell centred on the singularity:
    // int_{[0,1]^3} 1/r = (3/2) int_{[0,1]^2} (1 + u^2 + v^2)^{-1/2}.
    const auto rule = legendre(40);
    double cube = 0.0;
    for (auto [u, wu] : rule) {
        for (auto [v, wv] : rule) cube += wu * wv / std::sqrt(1 + u * u + v * v);
    }
    cube *= 1.5;
    CHECK(coulomb_cell_integral(3, {0, 0, 0}, {1, 1, 1}) == doctest::Approx(cube).epsilon(1e-13));
    CHECK(coulomb_cell_integral(3, {-1, -1, -1}, {1, 1, 1}) == doctest::Approx(8 * cube).epsilon(1e-13));
    CHECK(coulomb_cell_integral(2, {0, 0, 0}, {1, 1, 0}) == doctest::Approx(2 * std::asinh(1.0)).epsilon(1e-14));

    // Off-origin box against a tensor Gauss-Legendre rule.
    const std::array<double, 3> lo{0.5, -0.25, 1.0}, hi{1.25, 0.5, 1.5};
    double brute = 0.0;
    for (auto [a, wa] : rule) {
        for (auto [b, wb] : rule) {
            for (auto [c, wc] : rule) {
                const double x = lo[0] + a * (hi[0] - lo[0]);
                const double y = lo[1] + b * (hi[1] - lo[1]);
                const double z = lo[2] + c * (hi[2] - lo[2]);
                brute += wa * wb * wc / std::sqrt(x * x + y * y + z * z);
            }
        }
    }
    brute *= (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    CHECK(coulomb_cell_integral(3, lo, hi) == doctest::Approx(brute).epsilon(1e-12));
    CHECK_THROWS_AS(coulomb_cell_integral(1, {-1, 0, 0}, {1, 0, 0}), SingularityError);

    const GridSpec g3(3, 4.0, 8);
    const auto cell = potential_on_grid(PotentialSpec(Coulomb{2.0, std::nullopt}, Sampling::cell_average), g3);
    const double h = g3.spacing();
    CHECK(at_point(cell, {0, 0, 0}) == doctest::Approx(-2.0 * 8 * cube * std::pow(h / 2, 2) / (h * h * h)).epsilon(1e-12));
}

TEST_CASE("spectral Coulomb equals the plane-wave Galerkin matrix") {
    // Basis e^{i q x} / L^{3/2}, q on the N-point momentum lattice; the Coulomb
    // potential truncated to |x| < L/2 has coefficients -4 pi Z (1 - cos(qR)) / q^2.
    const double L = 8.0, Z = 1.0, R = L / 2;
    const GridSpec g(3, L, 4);
    const double dk = 2 * pi / L;
    std::vector<std::array<int, 3>> modes;
    for (int a = -2; a < 2; ++a)
        for (int b = -2; b < 2; ++b)
            for (int c = -2; c < 2; ++c) modes.push_back({a, b, c});
    const std::size_t n = modes.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double q2 = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double q = dk * (modes[i][static_cast<std::size_t>(a)] - modes[j][static_cast<std::size_t>(a)]);
                q2 += q * q;
            }
            const double c = q2 == 0.0 ? -2 * pi * Z * R * R : -4 * pi * Z * (1 - std::cos(std::sqrt(q2) * R)) / q2;
            H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c / (L * L * L);
        }
        double k2 = 0.0;
        for (int a = 0; a < 3; ++a) k2 += std::pow(dk * modes[i][static_cast<std::size_t>(a)], 2);
        H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += 0.5 * k2;
    }
    const double oracle = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues()(0);
    onebody::SolverOptions opt;
    opt.tol = 1e-11;
    const auto gs = onebody::ground_state(KineticProfile::nonrelativistic(1.0),
                                          PotentialSpec(Coulomb{Z, std::nullopt}, Sampling::spectral), g, opt);
    CHECK(gs.result.eigenvalue == doctest::Approx(oracle).epsilon(1e-10));
}

TEST_CASE("tabulated potentials") {
    const GridSpec g(2, 3.0, 4);
    std::vector<double> values(g.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 0.1 * static_cast<double>(i) - 0.7;
    const auto path = (std::filesystem::temp_directory_path() / "bindcert_tab.txt").string();
    write_tabulated(path, g, values);
    const auto t = read_tabulated(path);
    CHECK(t.source == g);
    CHECK(t.samples == values);
    const auto sampled = potential_on_grid(PotentialSpec(t), g).values;
    CHECK(sampled == values);
    CHECK_THROWS_AS(potential_on_grid(PotentialSpec(t), GridSpec(1, 3.0, 4)), DimensionError);
    CHECK_THROWS_AS(parse_tabulated("1 2.0 4\n1\n2\n"), DimensionError);
    std::filesystem::remove(path);
}

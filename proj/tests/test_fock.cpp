#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "bindcert/errors.hpp"
#include "bindcert/fock.hpp"
#include "bindcert/random.hpp"

using namespace bindcert;
using namespace bindcert::fock;
using std::numbers::pi;

namespace {

RandomInstanceOptions small(bool decoupled = false) {
    RandomInstanceOptions o;
    o.max_dim = 1024;
    o.decoupled = decoupled;
    return o;
}

LanczosOptions tight() {
    LanczosOptions o;
    o.tol = 1e-11;
    return o;
}

NelsonInstance one_mode(double L, int N, int n_max, Complex g, double omega, std::vector<double> P) {
    NelsonInstance in;
    in.grid = GridSpec(1, L, N);
    in.B = BernsteinFunction(0.0, 0.7, {{2.0, 0.5}});
    in.trunc.n_max = n_max;
    in.trunc.modes.push_back({2 * pi / L, g, omega});
    in.P = std::move(P);
    in.V = PotentialSpec(GaussianWell{1.5, 0.8});
    return in;
}

double lowest(const Eigen::MatrixXcd& H) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

TEST_CASE("two sites and one mode match the hand-built matrix") {
    const double L = 3.0, omega = 0.8, p0 = 0.1, p1 = -0.4, p2 = 0.6;
    const Complex g = std::polar(0.9, 0.3);
    const double k = 2 * pi / L;
    const double Bk = 0.7 * k * k + 0.5 * (1 - std::exp(-2.0 * k * k));
    const double x[2] = {-L / 2, 0.0};

    for (auto ordering : {PolynomialTruncation::compressed, PolynomialTruncation::matrix_polynomial}) {
        auto in = one_mode(L, 2, 1, g, omega, {p0, p1, p2});
        in.ordering = ordering;
        // Basis (site s, occupation n) -> 2 s + n.
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(4, 4);
        for (int s = 0; s < 2; ++s) {
            for (int t = 0; t < 2; ++t) {
                for (int n = 0; n < 2; ++n) H(2 * s + n, 2 * t + n) += s == t ? Bk / 2 : -Bk / 2;
            }
            const Complex u = g * std::polar(1.0, -k * x[s]) / std::sqrt(2.0);
            const double top = ordering == PolynomialTruncation::compressed ? 3 * std::norm(u) : std::norm(u);
            H(2 * s + 1, 2 * s) += p1 * u;
            H(2 * s, 2 * s + 1) += p1 * std::conj(u);
            H(2 * s, 2 * s) += p0 + p2 * std::norm(u);
            H(2 * s + 1, 2 * s + 1) += p0 + p2 * top + omega;
        }
        const auto A = assemble(in);
        const Eigen::MatrixXcd dense = Eigen::MatrixXcd(A.H0);
        CHECK((dense - H).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(dense_lowest(A.H0) == doctest::Approx(lowest(H)).epsilon(1e-13));
        CHECK(A.hermiticity_defect <= kHermiticityTolerance);
    }
}

TEST_CASE("vacuum expectation of phi^2 is half the summed coupling strength") {
    NelsonInstance in;
    in.grid = GridSpec(1, 6.0, 4);
    in.B = BernsteinFunction(0.0, 0.0, {});
    in.trunc.n_max = 2;
    double sum = 0.0;
    for (int j = 1; j <= 3; ++j) {
        const Complex g = std::polar(0.3 * j, 0.7 * j);
        in.trunc.modes.push_back({j * in.grid.momentum_quantum(), g, 1.0});
        sum += std::norm(g);
    }
    in.P = {0.0, 0.0, 1.0};
    const auto A = assemble(in);
    const std::size_t D = in.fock_dim();
    for (int s = 0; s < 4; ++s) {
        const auto i = static_cast<Eigen::Index>(s * D);
        CHECK(std::abs(A.H0.coeff(i, i) - Complex(0.5 * sum, 0.0)) <= 1e-14);
    }
}

TEST_CASE("decoupled instances factorize") {
    NelsonInstance in = one_mode(6.0, 16, 2, {0.0, 0.0}, 1.0, {});
    in.V = PotentialSpec();
    const auto A = assemble(in);
    const auto pair = ground_pair(in, A, tight());
    CHECK(std::abs(pair.E0) <= 1e-12);

    in.V = PotentialSpec(SquareWell{2.0, 1.0});
    in.P = {0.25};
    const auto rep = theorem_verify(in, tight());
    CHECK(rep.decoupled);
    CHECK(std::abs(rep.E0 - 0.25) <= 1e-10);
    CHECK(std::abs(rep.EV - rep.E0 - rep.e0) <= 1e-10);
    CHECK(std::abs(rep.slack) <= 1e-10);
    CHECK(rep.h2 <= 1e-14);
}

TEST_CASE("sparse and dense ground energies agree") {
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        RandomInstanceOptions opt;
        opt.max_dim = 2048;
        const auto in = random_instance(seed, opt);
        const auto A = assemble(in);
        CHECK(A.hermiticity_defect <= kHermiticityTolerance);
        const auto pair = ground_pair(in, A, tight());
        REQUIRE(pair.dense_E0.has_value());
        CHECK(pair.converged);
        CHECK(std::abs(pair.E0 - *pair.dense_E0) <= 1e-10);
        CHECK(std::abs(pair.EV - *pair.dense_EV) <= 1e-10);
        CHECK(pair.residual0 <= 1e-11);
    }
}

TEST_CASE("constant and nonnegative potentials") {
    auto in = random_instance(41);
    in.V = PotentialSpec(ConstantPotential{-0.75});
    const auto pair = ground_pair(in, assemble(in), tight());
    CHECK(std::abs(pair.EV - (pair.E0 - 0.75)) <= 1e-10);

    in.V = PotentialSpec(GaussianWell{-1.0, 0.7});  // a bump, V >= 0
    const auto rep = theorem_verify(in, tight());
    CHECK(rep.e0 >= -1e-12);
    CHECK(rep.EV >= rep.E0 - 1e-10);
}

TEST_CASE("translation symmetry check") {
    auto in = random_instance(42);
    CHECK(check_h2(in, assemble(in).H0) <= kH2Tolerance);

    auto off = one_mode(8.0, 8, 2, {0.5, 0.0}, 1.0, {0.0, 0.0, 0.3});
    off.trunc.modes[0].k = 0.9;
    CHECK_FALSE(off.modes_on_lattice());
    CHECK(check_h2(off, assemble(off).H0) > 1e-6);
    CHECK_THROWS_AS(theorem_verify(off, tight()), HypothesisError);

    auto free = one_mode(8.0, 8, 2, {0.0, 0.0}, 1.0, {0.0, 1.0, 0.3});
    free.trunc.modes[0].k = 0.9;
    CHECK(check_h2(free, assemble(free).H0) <= 1e-14);
    CHECK(check_h3(free).max_margin <= kH3Tolerance);
}

TEST_CASE("trial state claims") {
    SUBCASE("constant f with no coupling") {
        auto in = one_mode(6.0, 8, 2, {0.0, 0.0}, 1.0, {0.0, 0.0, 0.5});
        const auto A = assemble(in);
        const auto pair = ground_pair(in, A, tight());
        std::vector<Complex> f(8, Complex(1.0 / std::sqrt(8.0), 0.0));
        const auto rep = trial_state_verify(in, A, pair.F0, f);
        CHECK(rep.ok());
        CHECK(std::abs(rep.norm - 1.0) <= kTrialNormTolerance);
        CHECK(rep.potential_lhs == doctest::Approx(rep.potential_rhs).epsilon(1e-14));
    }
    SUBCASE("zero potential") {
        auto in = random_instance(43, small());
        in.V = PotentialSpec();
        const auto A = assemble(in);
        const auto pair = ground_pair(in, A, tight());
        std::vector<Complex> f(static_cast<std::size_t>(in.grid.points()));
        for (std::size_t s = 0; s < f.size(); ++s) f[s] = std::exp(-0.1 * static_cast<double>(s));
        const auto rep = trial_state_verify(in, A, pair.F0, f);
        CHECK(rep.potential_lhs == 0.0);
        CHECK(rep.potential_rhs == 0.0);
        CHECK(rep.ok());
    }
    SUBCASE("discrete Gaussian on random instances") {
        for (std::uint64_t seed = 50; seed < 56; ++seed) {
            const auto in = random_instance(seed, small());
            const auto A = assemble(in);
            const auto pair = ground_pair(in, A, tight());
            std::vector<Complex> f(static_cast<std::size_t>(in.grid.points()));
            for (int s = 0; s < in.grid.points(); ++s) {
                const double x = in.grid.position(s);
                f[static_cast<std::size_t>(s)] = std::exp(-x * x);
            }
            const auto rep = trial_state_verify(in, A, pair.F0, f);
            CHECK(rep.kinetic_margin() <= kTrialKineticTolerance);
            CHECK(rep.ok());
            CHECK(rep.energy_bound >= pair.EV - 1e-10);
        }
    }
    SUBCASE("complex f is rejected") {
        const auto in = random_instance(44);
        const auto A = assemble(in);
        std::vector<Complex> F(in.dim(), Complex(1.0, 0.0));
        std::vector<Complex> f(static_cast<std::size_t>(in.grid.points()), Complex(1.0, 0.0));
        f[1] = Complex(1.0, 0.5);
        CHECK_THROWS_AS(trial_state_verify(in, A, F, f), DomainError);
        CHECK_THROWS_AS(trial_state_verify(in, A, F, std::vector<Complex>(3)), DimensionError);
    }
}

TEST_CASE("theorem inequality on random instances") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto opt = small(seed % 3 == 0);
        const auto rep = theorem_verify(random_instance(seed, opt), tight());
        CHECK(rep.converged);
        CHECK(rep.slack >= -1e-9);
        CHECK(rep.trial.ok());
        CHECK(rep.certified());
        if (opt.decoupled) CHECK(std::abs(rep.slack) <= 1e-10);
    }
}

TEST_CASE("one-body energy must come from the same lattice operator") {
    const auto in = random_instance(45);
    onebody::SolverOptions so;
    so.tol = 1e-11;
    auto other = in;
    other.V = PotentialSpec(GaussianWell{0.5, 2.0});
    CHECK_THROWS_AS(theorem_verify(in, instance_onebody(other, so), tight()), ConsistencyError);
    CHECK_NOTHROW(theorem_verify(in, instance_onebody(in, so), tight()));
    CHECK(instance_onebody(in, so).result.checksum == instance_checksum(in));
}

TEST_CASE("raising the occupation cap never raises the energies") {
    for (std::uint64_t seed = 200; seed < 205; ++seed) {
        RandomInstanceOptions opt;
        opt.max_modes = 2;
        auto in = random_instance(seed, opt);
        double e0 = 1e300, ev = 1e300;
        for (int n = 1; n <= 4; ++n) {
            in.trunc.n_max = n;
            const auto pair = ground_pair(in, assemble(in), tight(), false);
            CHECK(pair.E0 <= e0 + 1e-10);
            CHECK(pair.EV <= ev + 1e-10);
            e0 = pair.E0;
            ev = pair.EV;
        }
    }
}

TEST_CASE("instance validation") {
    auto in = one_mode(6.0, 8, 2, {0.3, 0.0}, 1.0, {0.0, 0.0, 1.0});
    CHECK_NOTHROW(in.validate());
    CHECK_FALSE(in.continuum_unbounded());

    auto linear = in;
    linear.P = {0.0, 1.0, 0.0};
    CHECK(linear.degree() == 1);
    CHECK(linear.continuum_unbounded());
    CHECK_NOTHROW(linear.validate());

    auto cubic = in;
    cubic.P = {0.0, 0.0, 0.0, 1.0};
    CHECK_THROWS_AS(cubic.validate(), DomainError);
    auto negative = in;
    negative.P = {0.0, 0.0, -1.0};
    CHECK_THROWS_AS(negative.validate(), DomainError);
    auto zero_cap = in;
    zero_cap.trunc.n_max = 0;
    CHECK_THROWS_AS(zero_cap.validate(), DomainError);
    auto drift = in;
    drift.B = BernsteinFunction(1.0, 1.0, {});
    CHECK_THROWS_AS(drift.validate(), DomainError);
    auto spectral = in;
    spectral.V = in.V.with_sampling(Sampling::spectral);
    CHECK_THROWS_AS(spectral.validate(), DomainError);
    auto planar = in;
    planar.grid = GridSpec(2, 6.0, 8);
    CHECK_THROWS_AS(planar.validate(), DimensionError);
    auto big = in;
    big.trunc.modes.assign(8, {in.grid.momentum_quantum(), {0.1, 0.0}, 1.0});
    big.trunc.n_max = 4;
    CHECK_THROWS_AS(assemble(big), SizeError);
    big.dim_cap = 10000000;
    CHECK_NOTHROW(big.validate());
}

TEST_CASE("random instances are reproducible and within range") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const auto a = random_instance(seed);
        const auto b = random_instance(seed);
        CHECK(a.grid == b.grid);
        CHECK(a.P == b.P);
        REQUIRE(a.trunc.modes.size() == b.trunc.modes.size());
        for (std::size_t j = 0; j < a.trunc.modes.size(); ++j) {
            CHECK(a.trunc.modes[j].k == b.trunc.modes[j].k);
            CHECK(a.trunc.modes[j].g == b.trunc.modes[j].g);
        }
        CHECK(a.grid.points() <= 32);
        CHECK(a.trunc.modes.size() <= 4);
        CHECK(a.trunc.n_max <= 3);
        CHECK(a.B.atoms().size() <= 4);
        CHECK(a.degree() <= 2);
        CHECK(a.dim() <= 4096);
        CHECK(a.modes_on_lattice());
        CHECK_NOTHROW(a.validate());
    }
}

#include "bindcert/fock.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bindcert/errors.hpp"
#include "bindcert/random.hpp"

namespace bindcert::fock {

namespace {

using Triplet = Eigen::Triplet<Complex>;

struct Radix {
    int modes;
    int cap;
    std::size_t size;
    std::vector<std::size_t> stride;

    Radix(int m, int c) : modes(m), cap(c), size(1), stride(static_cast<std::size_t>(m)) {
        for (int j = 0; j < m; ++j) {
            stride[static_cast<std::size_t>(j)] = size;
            size *= static_cast<std::size_t>(c + 1);
        }
    }
    int occupation(std::size_t index, int j) const {
        return static_cast<int>((index / stride[static_cast<std::size_t>(j)]) % static_cast<std::size_t>(cap + 1));
    }
};

std::vector<double> trimmed(const std::vector<double>& p) {
    std::vector<double> out = p;
    while (!out.empty() && out.back() == 0.0) out.pop_back();
    return out;
}

SparseMatrix identity(std::size_t n) {
    SparseMatrix I(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    I.setIdentity();
    return I;
}

/// P(phi_s) on the n_max space.
SparseMatrix polynomial_block(const NelsonInstance& in, int site) {
    const auto p = trimmed(in.P);
    const Radix small(static_cast<int>(in.trunc.modes.size()), in.trunc.n_max);
    if (p.empty()) return SparseMatrix(static_cast<Eigen::Index>(small.size), static_cast<Eigen::Index>(small.size));
    const int deg = static_cast<int>(p.size()) - 1;
    const int extra = in.ordering == PolynomialTruncation::compressed ? deg : 0;
    const SparseMatrix phi = field_operator(in, site, extra);
    const std::size_t big = static_cast<std::size_t>(phi.rows());
    const SparseMatrix I = identity(big);

    SparseMatrix R = p.back() * I;
    for (int i = deg - 1; i >= 0; --i) {
        SparseMatrix next = (R * phi).pruned();
        next += p[static_cast<std::size_t>(i)] * I;
        R = std::move(next);
    }
    if (extra == 0) return R;

    const Radix large(small.modes, in.trunc.n_max + extra);
    std::vector<long> compact(large.size, -1);
    for (std::size_t a = 0; a < large.size; ++a) {
        std::size_t idx = 0;
        bool inside = true;
        for (int j = 0; j < large.modes && inside; ++j) {
            const int n = large.occupation(a, j);
            inside = n <= in.trunc.n_max;
            idx += static_cast<std::size_t>(n) * small.stride[static_cast<std::size_t>(j)];
        }
        if (inside) compact[a] = static_cast<long>(idx);
    }
    std::vector<Triplet> t;
    for (Eigen::Index r = 0; r < R.outerSize(); ++r) {
        if (compact[static_cast<std::size_t>(r)] < 0) continue;
        for (SparseMatrix::InnerIterator it(R, r); it; ++it) {
            const long c = compact[static_cast<std::size_t>(it.col())];
            if (c >= 0) t.emplace_back(compact[static_cast<std::size_t>(r)], c, it.value());
        }
    }
    SparseMatrix out(static_cast<Eigen::Index>(small.size), static_cast<Eigen::Index>(small.size));
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

/// First column of the circulant position-space kinetic matrix.
std::vector<double> kinetic_column(const NelsonInstance& in) {
    const auto K = kinetic_on_grid(instance_kinetic(in), in.grid).values;
    const int N = in.grid.points();
    std::vector<double> c(static_cast<std::size_t>(N), 0.0);
    for (int d = 0; d < N; ++d) {
        long double s = 0.0L;
        for (int i = 0; i < N; ++i) {
            const int n = in.grid.mode_number(i);
            const int phase = ((n * d) % N + N) % N;
            s += static_cast<long double>(K[static_cast<std::size_t>(i)]) *
                 std::cos(2.0L * std::numbers::pi_v<long double> * phase / N);
        }
        c[static_cast<std::size_t>(d)] = static_cast<double>(s / N);
    }
    return c;
}

double max_abs(const SparseMatrix& A) {
    double m = 0.0;
    for (Eigen::Index r = 0; r < A.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(A, r); it; ++it) m = std::max(m, std::abs(it.value()));
    }
    return m;
}

LinearMap sparse_map(const SparseMatrix& A) {
    return [&A](std::span<const Complex> x, std::span<Complex> y) {
        Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXcd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
        yv.noalias() = A * xv;
    };
}

double expectation(const SparseMatrix& A, std::span<const Complex> v) {
    Eigen::Map<const Eigen::VectorXcd> x(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::VectorXcd y = A * x;
    return x.dot(y).real();
}

}  // namespace

std::size_t NelsonInstance::fock_dim() const {
    return Radix(static_cast<int>(trunc.modes.size()), trunc.n_max).size;
}

int NelsonInstance::degree() const { return static_cast<int>(trimmed(P).size()) - 1; }

bool NelsonInstance::continuum_unbounded() const { return degree() == 1; }

bool NelsonInstance::modes_on_lattice(double tol) const {
    const double dk = grid.momentum_quantum();
    return std::all_of(trunc.modes.begin(), trunc.modes.end(), [&](const FieldMode& m) {
        return std::abs(m.k / dk - std::round(m.k / dk)) <= tol;
    });
}

bool NelsonInstance::decoupled() const {
    return std::all_of(trunc.modes.begin(), trunc.modes.end(),
                       [](const FieldMode& m) { return m.g == Complex{0.0, 0.0}; });
}

void NelsonInstance::validate() const {
    if (grid.dim() != 1) throw DimensionError("field instances live on a 1D lattice");
    if (trunc.n_max < 1) throw DomainError("occupation cap must be at least 1");
    if (B.drift_a() != 0.0) throw DomainError("kinetic B(k^2) needs B(0) = 0");
    if (V.sampling() == Sampling::spectral) throw DomainError("field instances need a diagonal potential");
    for (const auto& m : trunc.modes) {
        if (!(m.omega >= 0.0) || !std::isfinite(m.k) || !std::isfinite(std::abs(m.g))) {
            throw DomainError("mode needs finite k, g and omega >= 0");
        }
    }
    for (double c : P) {
        if (!std::isfinite(c)) throw DomainError("polynomial coefficients must be finite");
    }
    const int deg = degree();
    if (deg >= 2 && (deg % 2 != 0 || trimmed(P).back() <= 0.0)) {
        throw DomainError("P of degree >= 2 needs even degree and a positive leading coefficient");
    }
    // Guard the multiplication against overflow before comparing with the cap.
    const double approx = static_cast<double>(grid.points()) *
                          std::pow(static_cast<double>(trunc.n_max + 1), static_cast<double>(trunc.modes.size()));
    if (approx > static_cast<double>(dim_cap)) {
        throw SizeError("state space of " + std::to_string(static_cast<long long>(approx)) +
                        " exceeds the cap of " + std::to_string(dim_cap));
    }
}

SparseMatrix field_operator(const NelsonInstance& in, int site, int extra_cap) {
    const Radix r(static_cast<int>(in.trunc.modes.size()), in.trunc.n_max + extra_cap);
    const double x = in.grid.position(site);
    std::vector<Triplet> t;
    for (std::size_t a = 0; a < r.size; ++a) {
        for (int j = 0; j < r.modes; ++j) {
            const auto& m = in.trunc.modes[static_cast<std::size_t>(j)];
            const int n = r.occupation(a, j);
            if (n >= r.cap) continue;
            const std::size_t b = a + r.stride[static_cast<std::size_t>(j)];
            const Complex up = std::sqrt((n + 1) / 2.0) * m.g * std::polar(1.0, -m.k * x);
            t.emplace_back(b, a, up);
            t.emplace_back(a, b, std::conj(up));
        }
    }
    SparseMatrix phi(static_cast<Eigen::Index>(r.size), static_cast<Eigen::Index>(r.size));
    phi.setFromTriplets(t.begin(), t.end());
    return phi;
}

Assembled assemble(const NelsonInstance& in) {
    in.validate();
    const int N = in.grid.points();
    const Radix fock(static_cast<int>(in.trunc.modes.size()), in.trunc.n_max);
    const std::size_t D = fock.size;
    const std::size_t dim = static_cast<std::size_t>(N) * D;
    const auto col = kinetic_column(in);
    const auto V = potential_on_grid(in.V, in.grid).values;

    std::vector<Triplet> t;
    t.reserve(dim * static_cast<std::size_t>(N) + dim);
    for (int s = 0; s < N; ++s) {
        for (int s2 = 0; s2 < N; ++s2) {
            const double c = col[static_cast<std::size_t>(((s - s2) % N + N) % N)];
            if (c == 0.0) continue;
            for (std::size_t a = 0; a < D; ++a) t.emplace_back(s * D + a, s2 * D + a, c);
        }
        for (std::size_t a = 0; a < D; ++a) {
            double hf = 0.0;
            for (int j = 0; j < fock.modes; ++j) hf += in.trunc.modes[static_cast<std::size_t>(j)].omega * fock.occupation(a, j);
            if (hf != 0.0) t.emplace_back(s * D + a, s * D + a, hf);
        }
        const SparseMatrix P = polynomial_block(in, s);
        for (Eigen::Index r = 0; r < P.outerSize(); ++r) {
            for (SparseMatrix::InnerIterator it(P, r); it; ++it) {
                t.emplace_back(s * D + static_cast<std::size_t>(r), s * D + static_cast<std::size_t>(it.col()), it.value());
            }
        }
    }
    Assembled out;
    out.H0.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    out.H0.setFromTriplets(t.begin(), t.end());

    const SparseMatrix adj = out.H0.adjoint();
    const SparseMatrix diff = out.H0 - adj;
    out.hermiticity_defect = max_abs(diff);
    if (out.hermiticity_defect > kHermiticityTolerance) {
        throw NumericError("assembled Hamiltonian is not Hermitian (defect " +
                           std::to_string(out.hermiticity_defect) + ")");
    }
    out.H0 = (0.5 * (out.H0 + adj)).pruned();

    std::vector<Triplet> vt;
    for (int s = 0; s < N; ++s) {
        for (std::size_t a = 0; a < D; ++a) vt.emplace_back(s * D + a, s * D + a, V[static_cast<std::size_t>(s)]);
    }
    SparseMatrix Vop(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Vop.setFromTriplets(vt.begin(), vt.end());
    out.HV = out.H0 + Vop;
    return out;
}

double dense_lowest(const SparseMatrix& H) {
    const Eigen::MatrixXcd dense = Eigen::MatrixXcd(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

GroundPair ground_pair(const NelsonInstance& in, const Assembled& H, const LanczosOptions& options,
                       bool dense_check) {
    const std::size_t dim = in.dim();
    GroundPair out;
    const auto r0 = lowest_eigenpairs(dim, sparse_map(H.H0), options);
    const auto rV = lowest_eigenpairs(dim, sparse_map(H.HV), options);
    out.E0 = r0.values.at(0);
    out.EV = rV.values.at(0);
    out.F0 = r0.vectors.at(0);
    out.FV = rV.vectors.at(0);
    out.residual0 = r0.residuals.at(0);
    out.residualV = rV.residuals.at(0);
    out.converged = r0.converged && rV.converged;
    if (dense_check && dim <= kDenseOracleLimit) {
        out.dense_E0 = dense_lowest(H.H0);
        out.dense_EV = dense_lowest(H.HV);
    }
    return out;
}

SparseMatrix translation(const NelsonInstance& in) {
    const int N = in.grid.points();
    const Radix fock(static_cast<int>(in.trunc.modes.size()), in.trunc.n_max);
    const double dx = in.grid.spacing();
    std::vector<Triplet> t;
    for (int s = 0; s < N; ++s) {
        for (std::size_t a = 0; a < fock.size; ++a) {
            double total = 0.0;
            for (int j = 0; j < fock.modes; ++j) total += in.trunc.modes[static_cast<std::size_t>(j)].k * fock.occupation(a, j);
            t.emplace_back(s * fock.size + a, ((s + 1) % N) * fock.size + a, std::polar(1.0, dx * total));
        }
    }
    const auto dim = static_cast<Eigen::Index>(in.dim());
    SparseMatrix T(dim, dim);
    T.setFromTriplets(t.begin(), t.end());
    return T;
}

double check_h2(const NelsonInstance& in, const SparseMatrix& H0) {
    const SparseMatrix T = translation(in);
    const SparseMatrix Tadj = T.adjoint();
    const SparseMatrix conj = T * H0 * Tadj;
    const SparseMatrix diff = conj - H0;
    return max_abs(diff);
}

H3Report check_h3(const NelsonInstance& in) { return h3_margin(instance_kinetic(in), in.grid); }

KineticProfile instance_kinetic(const NelsonInstance& in) { return KineticProfile::bernstein(in.B); }

std::uint64_t instance_checksum(const NelsonInstance& in) {
    const auto K = kinetic_on_grid(instance_kinetic(in), in.grid).values;
    const auto V = potential_on_grid(in.V, in.grid).values;
    return onebody::lattice_checksum(in.grid, K, V, false);
}

onebody::GroundState instance_onebody(const NelsonInstance& in, const onebody::SolverOptions& options) {
    return onebody::ground_state(instance_kinetic(in), in.V, in.grid, options);
}

TrialReport trial_state_verify(const NelsonInstance& in, const Assembled& H, std::span<const Complex> F,
                               std::span<const Complex> f) {
    const int N = in.grid.points();
    const std::size_t D = in.fock_dim();
    if (F.size() != in.dim() || f.size() != static_cast<std::size_t>(N)) {
        throw DimensionError("trial state factors do not match the instance lattice");
    }
    double fmax = 0.0;
    for (const auto& z : f) fmax = std::max(fmax, std::abs(z));
    for (const auto& z : f) {
        if (std::abs(z.imag()) > 1e-13 * std::max(1.0, fmax)) throw DomainError("trial factor f must be real");
    }
    const double fn = norm2(f);
    const double Fn = norm2(F);
    if (!(fn > 0.0) || !(Fn > 0.0)) throw DomainError("trial factors must be non-zero");
    std::vector<double> fr(static_cast<std::size_t>(N));
    for (int s = 0; s < N; ++s) fr[static_cast<std::size_t>(s)] = f[static_cast<std::size_t>(s)].real() / fn;
    std::vector<Complex> Fu(F.begin(), F.end());
    for (auto& z : Fu) z /= Fn;

    const Radix fock(static_cast<int>(in.trunc.modes.size()), in.trunc.n_max);
    std::vector<double> momentum(D, 0.0);
    for (std::size_t a = 0; a < D; ++a) {
        for (int j = 0; j < fock.modes; ++j) momentum[a] += in.trunc.modes[static_cast<std::size_t>(j)].k * fock.occupation(a, j);
    }
    const auto V = potential_on_grid(in.V, in.grid).values;
    const double dx = in.grid.spacing();

    // With f_cont = f / sqrt(dx) and dy = dx the weights cancel: sum_y <f T^y F, A f T^y F>.
    TrialReport rep;
    long double norm = 0.0L, kin = 0.0L, pot = 0.0L;
    std::vector<Complex> phi(in.dim());
    for (int y = 0; y < N; ++y) {
        for (int s = 0; s < N; ++s) {
            const int src = (s + y) % N;
            for (std::size_t a = 0; a < D; ++a) {
                phi[s * D + a] = fr[static_cast<std::size_t>(s)] * std::polar(1.0, y * dx * momentum[a]) * Fu[src * D + a];
            }
        }
        const double n2 = norm2(phi);
        norm += static_cast<long double>(n2) * n2;
        kin += expectation(H.H0, phi);
        for (int s = 0; s < N; ++s) {
            long double w = 0.0L;
            for (std::size_t a = 0; a < D; ++a) w += std::norm(phi[s * D + a]);
            pot += V[static_cast<std::size_t>(s)] * w;
        }
    }
    rep.norm = static_cast<double>(norm);
    rep.kinetic_lhs = static_cast<double>(kin);
    rep.potential_lhs = static_cast<double>(pot);

    const auto col = kinetic_column(in);
    long double fk = 0.0L, fv = 0.0L;
    for (int s = 0; s < N; ++s) {
        fv += static_cast<long double>(V[static_cast<std::size_t>(s)]) * fr[static_cast<std::size_t>(s)] * fr[static_cast<std::size_t>(s)];
        for (int s2 = 0; s2 < N; ++s2) {
            fk += static_cast<long double>(fr[static_cast<std::size_t>(s)]) *
                  col[static_cast<std::size_t>(((s - s2) % N + N) % N)] * fr[static_cast<std::size_t>(s2)];
        }
    }
    rep.kinetic_rhs = expectation(H.H0, Fu) + static_cast<double>(fk);
    rep.potential_rhs = static_cast<double>(fv);
    rep.energy_bound = rep.kinetic_lhs + rep.potential_lhs;
    rep.norm_ok = std::abs(rep.norm - 1.0) <= kTrialNormTolerance;
    rep.kinetic_ok = rep.kinetic_margin() <= kTrialKineticTolerance;
    rep.potential_ok = std::abs(rep.potential_lhs - rep.potential_rhs) <= kTrialPotentialTolerance;
    return rep;
}

TheoremReport theorem_verify(const NelsonInstance& in, const onebody::GroundState& one,
                             const LanczosOptions& options) {
    in.validate();
    TheoremReport rep;
    rep.checksum = instance_checksum(in);
    if (one.result.checksum != rep.checksum) {
        throw ConsistencyError("one-body energy was computed on a different lattice operator");
    }
    const Assembled H = assemble(in);
    rep.h2 = check_h2(in, H.H0);
    rep.h3 = check_h3(in).max_margin;
    if (rep.h2 > kH2Tolerance || rep.h3 > kH3Tolerance) {
        throw HypothesisError("translation invariance or the kinetic inequality fails on this instance", rep.h2,
                              rep.h3);
    }
    rep.pair = ground_pair(in, H, options);
    rep.E0 = rep.pair.E0;
    rep.EV = rep.pair.EV;
    rep.e0 = one.result.eigenvalue;
    rep.slack = rep.E0 + rep.e0 - rep.EV;
    rep.decoupled = in.decoupled();
    rep.continuum_unbounded = in.continuum_unbounded();
    rep.converged = rep.pair.converged && one.result.converged;

    // The phase-normalized one-body ground state of a real operator is real up to rounding.
    std::vector<Complex> f(one.vector.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = {one.vector[i].real(), 0.0};
    rep.trial = trial_state_verify(in, H, rep.pair.F0, f);
    return rep;
}

TheoremReport theorem_verify(const NelsonInstance& in, const LanczosOptions& options) {
    onebody::SolverOptions so;
    so.tol = options.tol;
    so.max_iter = options.max_iter;
    so.seed = options.seed;
    so.basis_size = options.basis_size;
    return theorem_verify(in, instance_onebody(in, so), options);
}

NelsonInstance random_instance(std::uint64_t seed, const RandomInstanceOptions& opt) {
    Rng rng(seed);
    NelsonInstance in;

    std::vector<int> sizes;
    for (int n : {8, 16, 32}) {
        if (n <= opt.max_points) sizes.push_back(n);
    }
    if (sizes.empty()) sizes.push_back(std::max(2, opt.max_points - opt.max_points % 2));
    const int N = sizes[static_cast<std::size_t>(rng.pick(0, static_cast<int>(sizes.size()) - 1))];
    const double L = rng.uniform(4.0, 12.0);
    in.grid = GridSpec(1, L, N);

    std::vector<LevyAtom> atoms;
    const int n_atoms = rng.pick(0, opt.max_atoms);
    for (int i = 0; i < n_atoms; ++i) {
        atoms.push_back({std::exp(rng.uniform(std::log(0.1), std::log(10.0))), rng.uniform(0.05, 2.0)});
    }
    double b = rng.unit() < 0.25 ? 0.0 : rng.uniform(0.1, 1.0);
    if (atoms.empty() && b == 0.0) b = 0.5;
    in.B = BernsteinFunction(0.0, b, atoms);

    int M = rng.pick(std::min(1, opt.max_modes), opt.max_modes);
    int n_max = rng.pick(1, std::max(1, opt.max_n_max));
    auto fits = [&] {
        return static_cast<double>(N) * std::pow(n_max + 1.0, M) <= static_cast<double>(opt.max_dim);
    };
    while (!fits() && n_max > 1) --n_max;
    while (!fits() && M > 0) --M;
    in.trunc.n_max = n_max;
    const double dk = in.grid.momentum_quantum();
    for (int j = 0; j < M; ++j) {
        FieldMode m;
        m.k = dk * rng.pick(-N / 2 + 1, N / 2 - 1);
        m.omega = rng.uniform(0.5, 2.0);
        const double r = opt.decoupled ? 0.0 : rng.uniform(0.0, 1.0);
        m.g = std::polar(r, rng.uniform(-std::numbers::pi, std::numbers::pi));
        in.trunc.modes.push_back(m);
    }

    const std::array<double, 3> center{rng.uniform(-L / 4, L / 4), 0.0, 0.0};
    if (rng.unit() < 0.5) {
        in.V = PotentialSpec(GaussianWell{rng.uniform(0.5, 3.0), rng.uniform(0.3, 1.5)}, Sampling::point, center);
    } else {
        in.V = PotentialSpec(SquareWell{rng.uniform(0.5, 3.0), rng.uniform(0.5, L / 4)}, Sampling::point, center);
    }

    const int deg = rng.pick(std::min(1, opt.max_degree), std::max(0, std::min(opt.max_degree, 2)));
    in.P.assign(static_cast<std::size_t>(deg + 1), 0.0);
    for (int i = 0; i < deg; ++i) in.P[static_cast<std::size_t>(i)] = rng.uniform(-1.0, 1.0);
    in.P[static_cast<std::size_t>(deg)] = deg == 2 ? rng.uniform(0.05, 0.5) : rng.uniform(-1.0, 1.0);
    return in;
}

}  // namespace bindcert::fock

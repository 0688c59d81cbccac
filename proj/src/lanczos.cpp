#include "bindcert/lanczos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "bindcert/errors.hpp"

namespace bindcert {

Complex inner(std::span<const Complex> x, std::span<const Complex> y) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < x.size(); ++i) s += std::conj(x[i]) * y[i];
    return s;
}

double norm2(std::span<const Complex> x) {
    double s = 0.0;
    for (const auto& c : x) s += std::norm(c);
    return std::sqrt(s);
}

void normalize_phase(std::span<Complex> v) {
    double best = 0.0;
    for (const auto& c : v) best = std::max(best, std::abs(c));
    if (best == 0.0) return;
    for (const auto& c : v) {
        if (std::abs(c) >= best * (1.0 - 1e-12)) {
            const Complex rot = std::conj(c) / std::abs(c);
            for (auto& x : v) x *= rot;
            return;
        }
    }
}

namespace {

using Vec = std::vector<Complex>;

void random_unit(Vec& v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& c : v) c = {u(rng), u(rng)};
    const double n = norm2(v);
    for (auto& c : v) c /= n;
}

// Orthogonalizes w against basis[0..count) twice; returns the accumulated coefficients.
std::vector<Complex> orthogonalize(const std::vector<Vec>& basis, std::size_t count, Vec& w) {
    std::vector<Complex> coeff(count, Complex{0.0, 0.0});
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < count; ++i) {
            const Complex h = inner(basis[i], w);
            coeff[i] += h;
            for (std::size_t n = 0; n < w.size(); ++n) w[n] -= h * basis[i][n];
        }
    }
    return coeff;
}

Vec combine(const std::vector<Vec>& basis, const Eigen::MatrixXcd& s, Eigen::Index col) {
    Vec out(basis.front().size(), Complex{0.0, 0.0});
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        const Complex c = s(i, col);
        const auto& b = basis[static_cast<std::size_t>(i)];
        for (std::size_t n = 0; n < out.size(); ++n) out[n] += c * b[n];
    }
    return out;
}

}  // namespace

EigenPairs lowest_eigenpairs(std::size_t dim, const LinearMap& apply, const LanczosOptions& options,
                             std::span<const Complex> start) {
    if (dim == 0) throw DimensionError("empty operator");
    if (options.nev < 1 || options.nev > 2) throw DomainError("nev must be 1 or 2");
    if (!(options.tol > 0.0)) throw DomainError("tolerance must be > 0");
    const auto nev = static_cast<std::size_t>(options.nev);
    const std::size_t m = std::max<std::size_t>(static_cast<std::size_t>(options.basis_size), nev + 2);
    const std::size_t keep = std::clamp<std::size_t>(static_cast<std::size_t>(options.keep), nev, m - 2);

    std::mt19937_64 rng(options.seed);
    std::vector<Vec> basis;
    basis.reserve(m + 1);
    basis.emplace_back(dim);
    if (!start.empty()) {
        if (start.size() != dim) throw DimensionError("start vector has wrong size");
        std::copy(start.begin(), start.end(), basis.back().begin());
        const double n = norm2(basis.back());
        if (n == 0.0) throw DomainError("start vector is zero");
        for (auto& c : basis.back()) c /= n;
    } else {
        random_unit(basis.back(), rng);
    }

    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
    std::size_t expanded = 0;
    double scale = 0.0;
    EigenPairs result;
    Vec w(dim), hpsi(dim);

    auto finish = [&](const Eigen::MatrixXcd& S, const Eigen::VectorXd& theta, std::size_t size, bool converged) {
        result.values.clear();
        result.vectors.clear();
        result.residuals.clear();
        const std::size_t count = std::min(nev, size);
        std::vector<Vec> used(basis.begin(), basis.begin() + static_cast<std::ptrdiff_t>(size));
        for (std::size_t l = 0; l < count; ++l) {
            Vec psi = combine(used, S, static_cast<Eigen::Index>(l));
            const double n = norm2(psi);
            for (auto& c : psi) c /= n;
            apply(psi, hpsi);
            ++result.iterations;
            double r = 0.0;
            for (std::size_t i = 0; i < dim; ++i) r += std::norm(hpsi[i] - theta(static_cast<Eigen::Index>(l)) * psi[i]);
            normalize_phase(psi);
            result.values.push_back(theta(static_cast<Eigen::Index>(l)));
            result.residuals.push_back(std::sqrt(r));
            result.vectors.push_back(std::move(psi));
        }
        result.converged = converged;
        for (double r : result.residuals) result.converged = result.converged && r <= options.tol;
        return result.converged;
    };

    while (true) {
        const std::size_t j = expanded;  // next column to expand
        apply(basis[j], w);
        ++result.iterations;
        for (const auto& c : w) {
            if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
                throw NumericError("non-finite value in operator application");
            }
        }
        const auto coeff = orthogonalize(basis, j + 1, w);
        for (std::size_t i = 0; i < j; ++i) {
            T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = coeff[i];
            T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = std::conj(coeff[i]);
        }
        T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = coeff[j].real();
        scale = std::max(scale, std::abs(coeff[j].real()));
        ++expanded;

        const auto size = static_cast<Eigen::Index>(expanded);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(T.topLeftCorner(size, size));
        const Eigen::VectorXd& theta = eig.eigenvalues();
        const Eigen::MatrixXcd& S = eig.eigenvectors();
        for (Eigen::Index l = 0; l < size; ++l) scale = std::max(scale, std::abs(theta(l)));

        double beta = norm2(w);
        const bool exhausted = expanded == dim;
        const bool breakdown = beta <= 1e-13 * std::max(1.0, scale);

        bool estimate_ok = expanded >= nev || exhausted;
        for (std::size_t l = 0; l < std::min(nev, expanded); ++l) {
            const double est = (breakdown ? 0.0 : beta) * std::abs(S(size - 1, static_cast<Eigen::Index>(l)));
            estimate_ok = estimate_ok && est <= 0.5 * options.tol;
        }
        if (estimate_ok && (expanded >= nev || exhausted)) {
            if (finish(S, theta, expanded, true) || exhausted) return result;
        }
        if (exhausted) {
            finish(S, theta, expanded, true);
            return result;
        }
        if (result.iterations >= options.max_iter) {
            finish(S, theta, expanded, false);
            return result;
        }

        if (breakdown) {
            // Invariant subspace found; continue with a fresh orthogonal direction.
            random_unit(w, rng);
            orthogonalize(basis, expanded, w);
            beta = norm2(w);
        }
        if (basis.size() == expanded) basis.emplace_back(dim);
        for (std::size_t i = 0; i < dim; ++i) basis[expanded][i] = w[i] / beta;
        if (!breakdown) {
            T(size, size - 1) = beta;
            T(size - 1, size) = beta;
        }

        if (expanded == m) {
            // Thick restart: lowest `keep` Ritz vectors plus the pending direction.
            std::vector<Vec> fresh;
            fresh.reserve(m + 1);
            for (std::size_t l = 0; l < keep; ++l) fresh.push_back(combine(basis, S, static_cast<Eigen::Index>(l)));
            fresh.push_back(std::move(basis[expanded]));
            basis = std::move(fresh);
            T.setZero();
            for (std::size_t l = 0; l < keep; ++l) {
                T(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(l)) = theta(static_cast<Eigen::Index>(l));
            }
            expanded = keep;
            ++result.restarts;
        }
    }
}

}  // namespace bindcert

#include "bindcert/onebody.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bindcert/errors.hpp"
#include "bindcert/hash.hpp"

namespace bindcert::onebody {

namespace {

std::vector<std::size_t> padding_map(const GridSpec& coarse) {
    // FFT slot on the N lattice -> FFT slot on the 2N lattice for the same mode.
    const GridSpec fine(coarse.dim(), coarse.length(), 2 * coarse.points());
    const int n = coarse.points();
    std::vector<std::size_t> map(coarse.size());
    for (std::size_t f = 0; f < coarse.size(); ++f) {
        auto idx = coarse.unflatten(f);
        for (int a = 0; a < coarse.dim(); ++a) {
            auto& i = idx[static_cast<std::size_t>(a)];
            const int mode = i < n / 2 ? i : i - n;
            i = mode >= 0 ? mode : mode + 2 * n;
        }
        map[f] = fine.flatten(idx);
    }
    return map;
}

}  // namespace

std::uint64_t lattice_checksum(const GridSpec& grid, std::span<const double> kinetic,
                               std::span<const double> potential, bool spectral) {
    Fnv1a h;
    h.number(static_cast<std::int64_t>(grid.dim()));
    h.number(grid.length());
    h.number(static_cast<std::int64_t>(grid.points()));
    h.text(spectral ? "spectral" : "diagonal");
    h.numbers(kinetic);
    h.numbers(potential);
    return h.value();
}

Hamiltonian::Hamiltonian(const KineticProfile& K, const PotentialSpec& V, const GridSpec& grid)
    : grid_(grid), fft_(grid.dim(), grid.points()) {
    kinetic_centered_ = kinetic_on_grid(K, grid).values;
    kinetic_fft_ = centered_to_fft_order(grid, kinetic_centered_);
    if (V.sampling() == Sampling::spectral) {
        potential_ = spectral_potential_doubled(V, grid).values;
        fine_.emplace(grid.dim(), 2 * grid.points());
        pad_index_ = padding_map(grid);
    } else {
        potential_ = potential_on_grid(V, grid).values;
    }
    checksum_ = lattice_checksum(grid_, kinetic_centered_, potential_, spectral());
}

Hamiltonian::Hamiltonian(const LatticeField& kinetic, const LatticeField& potential)
    : grid_(kinetic.grid), fft_(kinetic.grid.dim(), kinetic.grid.points()) {
    if (!(kinetic.grid == potential.grid) || kinetic.values.size() != grid_.size() ||
        potential.values.size() != grid_.size()) {
        throw DimensionError("kinetic and potential fields must share the grid");
    }
    kinetic_centered_ = kinetic.values;
    kinetic_fft_ = centered_to_fft_order(grid_, kinetic_centered_);
    potential_ = potential.values;
    checksum_ = lattice_checksum(grid_, kinetic_centered_, potential_, false);
}

void Hamiltonian::apply(std::span<const Complex> psi, std::span<Complex> out) const {
    const std::size_t n = grid_.size();
    if (psi.size() != n || out.size() != n) throw DimensionError("state does not match the grid");
    std::vector<Complex> coeff(n), work(n);
    fft_.forward(psi, coeff);
    const double inv_n = 1.0 / static_cast<double>(n);

    if (!fine_) {
        for (std::size_t i = 0; i < n; ++i) work[i] = coeff[i] * (kinetic_fft_[i] * inv_n);
        fft_.backward(work, out);
        for (std::size_t i = 0; i < n; ++i) out[i] += potential_[i] * psi[i];
        return;
    }

    const std::size_t nf = fine_->size();
    std::vector<Complex> padded(nf, Complex{0.0, 0.0}), fine_vals(nf);
    for (std::size_t i = 0; i < n; ++i) padded[pad_index_[i]] = coeff[i];
    fine_->backward(padded, fine_vals);
    for (std::size_t i = 0; i < nf; ++i) fine_vals[i] *= potential_[i];
    fine_->forward(fine_vals, padded);
    const double inv_nf = 1.0 / static_cast<double>(nf);
    for (std::size_t i = 0; i < n; ++i) {
        work[i] = (coeff[i] * kinetic_fft_[i] + padded[pad_index_[i]] * inv_nf) * inv_n;
    }
    fft_.backward(work, out);
}

LinearMap Hamiltonian::as_map() const {
    return [this](std::span<const Complex> in, std::span<Complex> out) { apply(in, out); };
}

double Hamiltonian::rayleigh_floor() const {
    return *std::min_element(kinetic_centered_.begin(), kinetic_centered_.end()) +
           *std::min_element(potential_.begin(), potential_.end());
}

double Hamiltonian::rayleigh_ceiling() const {
    return *std::max_element(kinetic_centered_.begin(), kinetic_centered_.end()) +
           *std::max_element(potential_.begin(), potential_.end());
}

std::vector<Complex> apply_h(const LatticeField& kinetic, const LatticeField& potential,
                             const GridSpec& grid, std::span<const Complex> psi) {
    if (!(kinetic.grid == grid) || !(potential.grid == grid) || psi.size() != grid.size()) {
        throw DimensionError("apply_h: field or state shape does not match the grid");
    }
    const Hamiltonian h(kinetic, potential);
    std::vector<Complex> out(grid.size());
    h.apply(psi, out);
    return out;
}

GroundState ground_state(const Hamiltonian& h, const SolverOptions& options) {
    LanczosOptions lo;
    lo.tol = options.tol;
    lo.max_iter = options.max_iter;
    lo.seed = options.seed;
    lo.basis_size = options.basis_size;
    auto pairs = lowest_eigenpairs(h.grid().size(), h.as_map(), lo);

    GroundState gs;
    gs.result.eigenvalue = pairs.values.front();
    gs.result.residual = pairs.residuals.front();
    gs.result.iterations = pairs.iterations;
    gs.result.grid = h.grid();
    gs.result.converged = pairs.converged;
    gs.result.checksum = h.checksum();
    if (!pairs.converged) gs.result.notes.emplace_back("unconverged");
    gs.vector = std::move(pairs.vectors.front());
    return gs;
}

GroundState ground_state(const KineticProfile& K, const PotentialSpec& V, const GridSpec& grid,
                         const SolverOptions& options) {
    return ground_state(Hamiltonian(K, V, grid), options);
}

double boundary_mass(const GridSpec& grid, std::span<const Complex> psi) {
    double mass = 0.0, total = 0.0;
    const double quarter = 0.25 * grid.length();
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto x = grid.position_at(f);
        bool near = false;
        for (int a = 0; a < grid.dim(); ++a) near = near || std::abs(x[static_cast<std::size_t>(a)]) > quarter;
        const double w = std::norm(psi[f]);
        total += w;
        if (near) mass += w;
    }
    return total > 0.0 ? mass / total : 0.0;
}

GroundState ground_state_box_controlled(const KineticProfile& K, const PotentialSpec& V,
                                        const GridSpec& grid, const SolverOptions& options,
                                        double mass_tol, int max_doublings) {
    GridSpec g = grid;
    GroundState gs = ground_state(K, V, g, options);
    int doublings = 0;
    while (boundary_mass(g, gs.vector) >= mass_tol) {
        if (doublings == max_doublings) {
            gs.result.notes.emplace_back("box control: boundary mass above tolerance");
            break;
        }
        g = GridSpec(g.dim(), 2.0 * g.length(), 2 * g.points());
        gs = ground_state(K, V, g, options);
        ++doublings;
    }
    if (doublings > 0) gs.result.notes.push_back("box doubled " + std::to_string(doublings) + "x");
    return gs;
}

std::vector<Complex> trial_function(TrialKind kind, double theta, const GridSpec& grid,
                                    const std::array<double, 3>& center) {
    if (!(theta > 0.0)) throw DomainError("trial width must be > 0");
    std::vector<Complex> f(grid.size());
    double n2 = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto r = minimum_image(grid, grid.position_at(i), center);
        double rr = 0.0;
        for (int a = 0; a < grid.dim(); ++a) rr += r[static_cast<std::size_t>(a)] * r[static_cast<std::size_t>(a)];
        const double v = kind == TrialKind::gaussian ? std::exp(-rr / (2.0 * theta * theta))
                                                     : std::exp(-std::sqrt(rr) / theta);
        f[i] = v;
        n2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : f) c *= inv;
    return f;
}

double rayleigh_quotient(const Hamiltonian& h, std::span<const Complex> psi) {
    std::vector<Complex> hpsi(psi.size());
    h.apply(psi, hpsi);
    return inner(psi, hpsi).real() / inner(psi, psi).real();
}

VariationalBound variational_upper_bound(const Hamiltonian& h, const TrialFamily& family,
                                         const std::array<double, 3>& center, int iterations) {
    if (!(family.theta_min > 0.0) || !(family.theta_max >= family.theta_min)) {
        throw DomainError("trial family range must be nonempty and positive");
    }
    auto energy = [&](double theta) {
        return rayleigh_quotient(h, trial_function(family.kind, theta, h.grid(), center));
    };
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = family.theta_min, b = family.theta_max;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = energy(c), fd = energy(d);
    for (int it = 0; it < iterations; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = energy(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = energy(d);
        }
    }
    VariationalBound best{c, fc};
    if (fd < best.value) best = {d, fd};
    // Endpoints, in case the minimum sits on the boundary of the range.
    for (double t : {family.theta_min, family.theta_max}) {
        const double e = energy(t);
        if (e < best.value) best = {t, e};
    }
    return best;
}

double richardson_extrapolate(std::span<const GridSpec> grids, std::span<const double> values,
                              std::span<const int> orders) {
    const std::size_t n = orders.size() + 1;
    if (grids.size() != values.size() || grids.size() < n) {
        throw DomainError("Richardson extrapolation needs orders.size() + 1 samples");
    }
    const std::size_t first = grids.size() - n;
    const double ref = grids.back().spacing();
    Eigen::MatrixXd A(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const double h = grids[first + r].spacing() / ref;
        A(static_cast<Eigen::Index>(r), 0) = 1.0;
        for (std::size_t c = 0; c < orders.size(); ++c) {
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c + 1)) = std::pow(h, orders[c]);
        }
        rhs(static_cast<Eigen::Index>(r)) = values[first + r];
    }
    return A.colPivHouseholderQr().solve(rhs)(0);
}

ConvergenceStudy converge_study(const KineticProfile& K, const PotentialSpec& V,
                                std::span<const GridSpec> grids, const SolverOptions& options,
                                std::vector<int> orders) {
    if (grids.empty()) throw DomainError("convergence study needs at least one grid");
    ConvergenceStudy study;
    study.orders = std::move(orders);
    for (const auto& g : grids) study.rows.push_back(ground_state(K, V, g, options).result);

    for (std::size_t i = 1; i < study.rows.size(); ++i) {
        const auto& coarse = study.rows[i - 1];
        const auto& fine = study.rows[i];
        if (!coarse.grid.nested_in(fine.grid)) continue;
        if (fine.eigenvalue > coarse.eigenvalue + kNestedTolerance) {
            study.nested_monotone = false;
            study.warnings.push_back("nested refinement N=" + std::to_string(coarse.grid.points()) + "->" +
                                     std::to_string(fine.grid.points()) +
                                     " raised the eigenvalue (V aliasing / inconsistent sampling)");
        }
    }

    // Trailing run of grids sharing the final box length.
    std::vector<GridSpec> tail_grids;
    std::vector<double> tail_values;
    for (auto it = study.rows.rbegin(); it != study.rows.rend(); ++it) {
        if (it->grid.length() != study.rows.back().grid.length() || it->grid.dim() != study.rows.back().grid.dim()) break;
        tail_grids.insert(tail_grids.begin(), it->grid);
        tail_values.insert(tail_values.begin(), it->eigenvalue);
    }
    if (!study.orders.empty() && tail_grids.size() >= study.orders.size() + 1) {
        study.extrapolated = richardson_extrapolate(tail_grids, tail_values, study.orders);
    } else if (!study.orders.empty()) {
        study.warnings.emplace_back("too few same-L grids for extrapolation");
    }
    return study;
}

BindingCertificate binding_certificate(double e0, double tol, std::string provenance) {
    if (!(tol >= 0.0)) throw DomainError("certificate tolerance must be >= 0");
    BindingCertificate c;
    c.e0 = e0;
    c.tol = tol;
    c.binding_positive = e0 + tol < 0.0;
    c.lower_bound = c.binding_positive ? -(e0 + tol) : 0.0;
    c.provenance = std::move(provenance);
    return c;
}

void export_eigenvector(const std::string& path, const GridSpec& grid, std::span<const Complex> psi) {
    std::vector<double> re(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) re[i] = psi[i].real();
    write_tabulated(path, grid, re);
}

}  // namespace bindcert::onebody

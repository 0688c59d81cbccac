#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bindcert/fft.hpp"
#include "bindcert/grid.hpp"
#include "bindcert/kinetic.hpp"
#include "bindcert/lanczos.hpp"
#include "bindcert/potential.hpp"

namespace bindcert::onebody {

/// h = K(p) + V on the band-limited periodic lattice. K acts diagonally in
/// momentum; V either diagonally in position (point / cell_average sampling)
/// or as the exact Galerkin product evaluated on the doubled lattice
/// (spectral sampling).
class Hamiltonian {
public:
    Hamiltonian(const KineticProfile& K, const PotentialSpec& V, const GridSpec& grid);
    /// Diagonal form from precomputed fields (kinetic in centered momentum order).
    Hamiltonian(const LatticeField& kinetic, const LatticeField& potential);

    void apply(std::span<const Complex> psi, std::span<Complex> out) const;
    LinearMap as_map() const;

    const GridSpec& grid() const { return grid_; }
    bool spectral() const { return fine_.has_value(); }
    /// Kinetic samples, centered momentum order.
    const std::vector<double>& kinetic() const { return kinetic_centered_; }
    /// Potential multiplier: lattice samples, or doubled-lattice samples when spectral.
    const std::vector<double>& potential() const { return potential_; }

    /// Bounds of the Rayleigh quotient: [min K + min V, max K + max V].
    double rayleigh_floor() const;
    double rayleigh_ceiling() const;

    /// Digest of (grid, kinetic samples, potential samples, sampling kind).
    std::uint64_t checksum() const { return checksum_; }

private:
    GridSpec grid_;
    Fft fft_;
    std::optional<Fft> fine_;
    std::vector<double> kinetic_centered_;
    std::vector<double> kinetic_fft_;
    std::vector<double> potential_;
    std::vector<std::size_t> pad_index_;
    std::uint64_t checksum_ = 0;
};

/// Digest shared by every producer of a lattice operator K + V.
std::uint64_t lattice_checksum(const GridSpec& grid, std::span<const double> kinetic,
                               std::span<const double> potential, bool spectral);

/// InverseFT(K . FT(psi)) + V . psi with unitary transforms; K in centered order.
std::vector<Complex> apply_h(const LatticeField& kinetic, const LatticeField& potential,
                             const GridSpec& grid, std::span<const Complex> psi);

struct SolverOptions {
    double tol = 1e-9;
    int max_iter = 5000;
    std::uint64_t seed = 1;
    int basis_size = 40;
};

struct SolveResult {
    double eigenvalue = 0.0;
    double residual = 0.0;
    int iterations = 0;
    GridSpec grid;
    bool converged = false;
    std::uint64_t checksum = 0;
    std::vector<std::string> notes;
};

struct GroundState {
    SolveResult result;
    std::vector<Complex> vector;  ///< unit l2 norm, phase-normalized
};

GroundState ground_state(const Hamiltonian& h, const SolverOptions& options);
GroundState ground_state(const KineticProfile& K, const PotentialSpec& V, const GridSpec& grid,
                         const SolverOptions& options);

/// Fraction of |psi|^2 within L/4 of the box boundary on any axis.
double boundary_mass(const GridSpec& grid, std::span<const Complex> psi);

/// Doubles L (and N, keeping the spacing) until boundary_mass < mass_tol.
GroundState ground_state_box_controlled(const KineticProfile& K, const PotentialSpec& V,
                                        const GridSpec& grid, const SolverOptions& options,
                                        double mass_tol = 1e-8, int max_doublings = 3);

enum class TrialKind { gaussian, hydrogenic };

/// exp(-|x-c|^2 / (2 theta^2)) or exp(-|x-c| / theta), real, even about the
/// potential centre and l2-normalized on the lattice.
struct TrialFamily {
    TrialKind kind = TrialKind::gaussian;
    double theta_min = 0.1;
    double theta_max = 10.0;
};

std::vector<Complex> trial_function(TrialKind kind, double theta, const GridSpec& grid,
                                    const std::array<double, 3>& center = {0.0, 0.0, 0.0});

double rayleigh_quotient(const Hamiltonian& h, std::span<const Complex> psi);

struct VariationalBound {
    double theta = 0.0;
    double value = 0.0;
};

/// Golden-section minimization of the Rayleigh quotient over the family.
VariationalBound variational_upper_bound(const Hamiltonian& h, const TrialFamily& family,
                                         const std::array<double, 3>& center = {0.0, 0.0, 0.0},
                                         int iterations = 60);

/// e(N) = e_inf + sum_i a_i (L/N)^{orders_i}, solved exactly on the last
/// orders.size() + 1 samples.
double richardson_extrapolate(std::span<const GridSpec> grids, std::span<const double> values,
                              std::span<const int> orders);

inline constexpr double kNestedTolerance = 1e-10;

struct ConvergenceStudy {
    std::vector<SolveResult> rows;
    std::optional<double> extrapolated;
    std::vector<int> orders;
    std::vector<std::string> warnings;
    bool nested_monotone = true;
};

/// Solves on every grid (ordered by refinement), checks that nested refinements
/// never raise the eigenvalue and extrapolates over the trailing same-L grids.
ConvergenceStudy converge_study(const KineticProfile& K, const PotentialSpec& V,
                                std::span<const GridSpec> grids, const SolverOptions& options,
                                std::vector<int> orders = {2, 4});

struct BindingCertificate {
    double e0 = 0.0;
    double tol = 0.0;
    bool binding_positive = false;
    double lower_bound = 0.0;
    std::string provenance;
};

/// binding_positive iff e0 + tol < 0; then E_bin >= -(e0 + tol).
BindingCertificate binding_certificate(double e0, double tol, std::string provenance = {});

/// Writes the real part of a (phase-normalized) eigenvector in the tabulated format.
void export_eigenvector(const std::string& path, const GridSpec& grid, std::span<const Complex> psi);

}  // namespace bindcert::onebody

#pragma once

#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <vector>

#include "bindcert/bernstein.hpp"
#include "bindcert/grid.hpp"
#include "bindcert/kinetic.hpp"
#include "bindcert/lanczos.hpp"
#include "bindcert/onebody.hpp"
#include "bindcert/potential.hpp"

namespace bindcert::fock {

using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

/// One boson mode a_j with momentum k_j, coupling g_j and energy omega_j.
struct FieldMode {
    double k = 0.0;
    Complex g{0.0, 0.0};
    double omega = 0.0;
};

struct FockTruncation {
    std::vector<FieldMode> modes;
    int n_max = 1;  ///< occupation cap per mode
};

/// How P(phi) is truncated to the capped Fock space.
enum class PolynomialTruncation {
    /// P applied to phi on a cap raised by deg P, then compressed to n_max. The
    /// truncated Hamiltonian is then a compression of every larger truncation.
    compressed,
    /// P applied directly to the capped phi matrix.
    matrix_polynomial,
};

/// Particle on a periodic 1D lattice coupled to M boson modes:
///     H0 = B(p^2) (x) I + I (x) H_f + P(phi(x)),   HV = H0 + V (x) I,
///     phi(x) = 2^{-1/2} sum_j (g_j e^{-i k_j x} a_j^* + conj(g_j) e^{i k_j x} a_j).
/// Basis index = site * fock_dim + sum_j n_j (n_max+1)^j.
struct NelsonInstance {
    GridSpec grid{1, 8.0, 8};
    BernsteinFunction B = BernsteinFunction::linear(1.0);
    FockTruncation trunc;
    std::vector<double> P;  ///< P(s) = sum_i P[i] s^i
    PotentialSpec V;
    std::size_t dim_cap = 200000;
    PolynomialTruncation ordering = PolynomialTruncation::compressed;

    std::size_t fock_dim() const;
    std::size_t dim() const { return static_cast<std::size_t>(grid.points()) * fock_dim(); }
    int degree() const;
    /// Degree-1 P: fine at finite truncation, unbounded below in the continuum.
    bool continuum_unbounded() const;
    bool modes_on_lattice(double tol = 1e-9) const;
    bool decoupled() const;
    /// Throws SizeError / DomainError / DimensionError when an invariant fails.
    void validate() const;
};

struct Assembled {
    SparseMatrix H0;
    SparseMatrix HV;
    double hermiticity_defect = 0.0;  ///< max |H - H^*| before symmetrization
};

inline constexpr double kHermiticityTolerance = 1e-13;

Assembled assemble(const NelsonInstance& instance);

/// Per-site field operator phi(x_s) on the capped Fock space (cap = n_max + extra).
SparseMatrix field_operator(const NelsonInstance& instance, int site, int extra_cap = 0);

struct GroundPair {
    double E0 = 0.0;
    double EV = 0.0;
    std::vector<Complex> F0;  ///< ground vector of H0
    std::vector<Complex> FV;  ///< ground vector of HV
    double residual0 = 0.0;
    double residualV = 0.0;
    bool converged = false;
    /// Dense-diagonalization cross-check (dimension <= kDenseOracleLimit).
    std::optional<double> dense_E0;
    std::optional<double> dense_EV;
};

inline constexpr std::size_t kDenseOracleLimit = 2048;

GroundPair ground_pair(const NelsonInstance& instance, const Assembled& H,
                       const LanczosOptions& options, bool dense_check = true);

/// Lowest eigenvalue of a Hermitian sparse matrix by dense diagonalization.
double dense_lowest(const SparseMatrix& H);

/// Translation by one lattice spacing, T = e^{i dx P}, P = p + P_f.
SparseMatrix translation(const NelsonInstance& instance);

inline constexpr double kH2Tolerance = 1e-12;

/// max |T H0 T^* - H0|.
double check_h2(const NelsonInstance& instance, const SparseMatrix& H0);

/// h3_margin for K(k) = B(k^2) on the instance lattice.
H3Report check_h3(const NelsonInstance& instance);

/// Kinetic profile and lattice operator the one-body energy must be computed with.
KineticProfile instance_kinetic(const NelsonInstance& instance);
std::uint64_t instance_checksum(const NelsonInstance& instance);
onebody::GroundState instance_onebody(const NelsonInstance& instance, const onebody::SolverOptions& options);

struct TrialReport {
    double norm = 0.0;              ///< sum_y ||Phi_y||^2 dy
    double kinetic_lhs = 0.0;       ///< sum_y <Phi_y, H0 Phi_y> dy
    double kinetic_rhs = 0.0;       ///< <F, H0 F> + <f, K(p) f>
    double potential_lhs = 0.0;     ///< sum_y <Phi_y, V Phi_y> dy
    double potential_rhs = 0.0;     ///< <f, V f>
    double energy_bound = 0.0;      ///< kinetic_lhs + potential_lhs = <Phi, I (x) HV Phi>
    bool norm_ok = false;
    bool kinetic_ok = false;
    bool potential_ok = false;
    double kinetic_margin() const { return kinetic_lhs - kinetic_rhs; }
    bool ok() const { return norm_ok && kinetic_ok && potential_ok; }
};

inline constexpr double kTrialNormTolerance = 1e-12;
inline constexpr double kTrialKineticTolerance = 1e-10;
inline constexpr double kTrialPotentialTolerance = 1e-12;

/// Builds Phi_y = f(x) T^y F for every lattice translation y and checks the
/// three trial-state claims with the sum over y (weight dy = dx) in place of
/// the integral. `f` is l2-normalized on the lattice and must be real.
TrialReport trial_state_verify(const NelsonInstance& instance, const Assembled& H,
                               std::span<const Complex> F, std::span<const Complex> f);

inline constexpr double kSlackTolerance = 1e-9;

struct TheoremReport {
    double E0 = 0.0;
    double EV = 0.0;
    double e0 = 0.0;
    double slack = 0.0;  ///< E0 + e0 - EV
    double h2 = 0.0;
    double h3 = 0.0;
    TrialReport trial;
    GroundPair pair;
    bool decoupled = false;
    bool continuum_unbounded = false;
    bool converged = false;
    std::uint64_t checksum = 0;
    bool certified() const { return converged && slack >= -kSlackTolerance && trial.ok(); }
};

/// Checks (H.2), (H.3), the trial-state claims and E^V <= E^0 + e_0. The
/// one-body result must come from the identical lattice operator (compared by
/// checksum, ConsistencyError otherwise); failing hypotheses throw HypothesisError.
TheoremReport theorem_verify(const NelsonInstance& instance, const onebody::GroundState& onebody,
                             const LanczosOptions& options);

/// Convenience: computes the matching one-body ground state, then theorem_verify.
TheoremReport theorem_verify(const NelsonInstance& instance, const LanczosOptions& options);

struct RandomInstanceOptions {
    int max_atoms = 4;
    int max_modes = 4;
    int max_n_max = 3;
    int max_points = 32;
    int max_degree = 2;
    std::size_t max_dim = 4096;
    bool decoupled = false;
};

/// Deterministic random instance: Bernstein B with <= max_atoms atoms, lattice
/// modes, a Gaussian or square well and P of degree <= max_degree.
NelsonInstance random_instance(std::uint64_t seed, const RandomInstanceOptions& options = {});

}  // namespace bindcert::fock

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace bindcert {

using RealVector = std::vector<double>;

/// One point mass of the Lévy measure: weight `w` at rate `t`.
struct LevyAtom {
    double t;
    double w;
};

/// Bernstein function in Lévy–Khintchine form with an atomic measure,
///
///     B(u) = a + b u + sum_i w_i (1 - exp(-t_i u)),   u >= 0.
///
/// Immutable once constructed. Kinetic energies additionally need B(0) = 0,
/// i.e. a == 0; see vanishes_at_zero().
class BernsteinFunction {
public:
    BernsteinFunction() = default;
    BernsteinFunction(double a, double b, std::vector<LevyAtom> atoms);

    /// B(u) = b u.
    static BernsteinFunction linear(double b = 1.0);
    /// B(u) = w (1 - exp(-t u)).
    static BernsteinFunction one_minus_exp(double t = 1.0, double w = 1.0);
    /// Atomic approximation of sqrt(u + m^2) - m built from its Lévy density
    /// exp(-m^2 t) / (2 sqrt(pi) t^{3/2}) on a log-spaced rate grid.
    static BernsteinFunction sqrt_shifted(double mass = 1.0, int n_atoms = 64);

    double drift_a() const { return a_; }
    double drift_b() const { return b_; }
    std::span<const LevyAtom> atoms() const { return atoms_; }
    bool vanishes_at_zero() const { return a_ == 0.0; }

    /// sum_i w_i min(t_i, 1); finite for every valid instance.
    double levy_moment() const;

    /// Unchecked evaluation in the requested precision.
    template <typename Real>
    Real value_as(Real u) const {
        Real s = static_cast<Real>(a_) + static_cast<Real>(b_) * u;
        for (const auto& atom : atoms_) {
            s -= static_cast<Real>(atom.w) * std::expm1(-static_cast<Real>(atom.t) * u);
        }
        return s;
    }

    /// B'(0+) = b + sum w t.
    double first_derivative_at_zero() const;
    /// B''(0+) = -sum w t^2.
    double second_derivative_at_zero() const;

private:
    double a_ = 0.0;
    double b_ = 0.0;
    std::vector<LevyAtom> atoms_;
};

/// B(u); throws DomainError for u < 0.
double evaluate(const BernsteinFunction& B, double u);

/// n-th derivative for u > 0 and 1 <= n <= 4 (UnsupportedOrderError otherwise).
double derivative(const BernsteinFunction& B, double u, int n);

/// Sign convention for the derivatives of a Bernstein function.
enum class SignConvention {
    /// (-1)^(n-1) B^(n) >= 0: B' completely monotone (what the representation generates).
    standard,
    /// (-1)^n B^(n) >= 0 for n >= 1, as it is sometimes printed. Fails for B(u) = u.
    as_printed,
};

/// Largest violation of the chosen sign condition over orders 1..max_order and
/// the grid points (positive means violated).
double derivative_sign_violation(const BernsteinFunction& B, std::span<const double> u_grid,
                                 int max_order, SignConvention convention);

struct CubicBoundReport {
    double max_violation = 0.0;  ///< max of B(u) - [u^3/6 + B''(0) u^2/2 + B'(0) u]
    double argmax_u = 0.0;
    std::size_t evaluated = 0;
};

/// Evaluates the cubic comparison bound on every grid point. Reports, never asserts:
/// with B''(0) < 0 the right-hand side can dip below zero while B stays nonnegative.
CubicBoundReport cubic_upper_bound_check(const BernsteinFunction& B,
                                         std::span<const double> u_grid);

/// 1/2 (B(|p+k|^2) + B(|p-k|^2) - 2 B(|p|^2)) - B(|k|^2). Nonpositive for every
/// Bernstein function; evaluated in extended precision.
double lemma1_margin(const BernsteinFunction& B, std::span<const double> p,
                     std::span<const double> k);

struct Lemma1Report {
    double max_margin = 0.0;
    RealVector argmax_p;
    RealVector argmax_k;
    std::size_t pairs = 0;
};

/// Tolerance the pairwise check is held to; the inequality itself is exact.
inline constexpr double kLemma1Tolerance = 1e-12;

/// lemma1_margin over the Cartesian product of the grids.
Lemma1Report lemma1_check(const BernsteinFunction& B, std::span<const RealVector> p_grid,
                          std::span<const RealVector> k_grid);

/// [-e^{-|p+k|^2 t} - e^{-|p-k|^2 t} + 2 e^{-|p|^2 t}] - 2 (1 - e^{-|k|^2 t}).
/// Nonpositive for t >= 0; throws DomainError for t < 0.
double exponential_inequality_check(double t, std::span<const double> p,
                                    std::span<const double> k);

}  // namespace bindcert

#include "bindcert/bernstein.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "bindcert/errors.hpp"

namespace bindcert {

namespace {

long double dot_ld(std::span<const double> x, std::span<const double> y) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += static_cast<long double>(x[i]) * static_cast<long double>(y[i]);
    }
    return s;
}

long double shifted_norm2(std::span<const double> p, std::span<const double> k, double sign) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const long double c = static_cast<long double>(p[i]) + sign * static_cast<long double>(k[i]);
        s += c * c;
    }
    return s;
}

void require_same_dim(std::span<const double> p, std::span<const double> k) {
    if (p.size() != k.size() || p.empty()) {
        throw DimensionError("momentum vectors must share a nonzero dimension");
    }
}

}  // namespace

BernsteinFunction::BernsteinFunction(double a, double b, std::vector<LevyAtom> atoms)
    : a_(a), b_(b), atoms_(std::move(atoms)) {
    if (!(a_ >= 0.0) || !std::isfinite(a_)) throw DomainError("Bernstein drift a must be >= 0");
    if (!(b_ >= 0.0) || !std::isfinite(b_)) throw DomainError("Bernstein drift b must be >= 0");
    for (const auto& atom : atoms_) {
        if (!(atom.t > 0.0) || !std::isfinite(atom.t)) {
            throw DomainError("Levy atom rate must be > 0");
        }
        if (!(atom.w > 0.0) || !std::isfinite(atom.w)) {
            throw DomainError("Levy atom weight must be > 0");
        }
    }
    if (!std::isfinite(levy_moment())) throw DomainError("Levy measure moment is not finite");
}

BernsteinFunction BernsteinFunction::linear(double b) { return {0.0, b, {}}; }

BernsteinFunction BernsteinFunction::one_minus_exp(double t, double w) {
    return {0.0, 0.0, {{t, w}}};
}

BernsteinFunction BernsteinFunction::sqrt_shifted(double mass, int n_atoms) {
    if (!(mass > 0.0)) throw DomainError("sqrt_shifted needs mass > 0");
    if (n_atoms < 2) throw DomainError("sqrt_shifted needs at least two atoms");
    // Midpoint rule in s = log t over [log 1e-8, log(60/m^2)].
    const double s_lo = std::log(1e-8);
    const double s_hi = std::log(60.0 / (mass * mass));
    const double ds = (s_hi - s_lo) / n_atoms;
    const double norm = 1.0 / (2.0 * std::sqrt(std::numbers::pi));
    std::vector<LevyAtom> atoms;
    atoms.reserve(static_cast<std::size_t>(n_atoms));
    for (int i = 0; i < n_atoms; ++i) {
        const double t = std::exp(s_lo + (i + 0.5) * ds);
        const double density = norm * std::exp(-mass * mass * t) / (t * std::sqrt(t));
        atoms.push_back({t, density * t * ds});
    }
    return {0.0, 0.0, std::move(atoms)};
}

double BernsteinFunction::levy_moment() const {
    double s = 0.0;
    for (const auto& atom : atoms_) s += atom.w * std::min(atom.t, 1.0);
    return s;
}

double BernsteinFunction::first_derivative_at_zero() const {
    double s = b_;
    for (const auto& atom : atoms_) s += atom.w * atom.t;
    return s;
}

double BernsteinFunction::second_derivative_at_zero() const {
    double s = 0.0;
    for (const auto& atom : atoms_) s -= atom.w * atom.t * atom.t;
    return s;
}

double evaluate(const BernsteinFunction& B, double u) {
    if (!(u >= 0.0)) throw DomainError("Bernstein function evaluated at negative argument");
    return B.value_as(u);
}

double derivative(const BernsteinFunction& B, double u, int n) {
    if (n < 1 || n > 4) {
        throw UnsupportedOrderError("derivative order " + std::to_string(n) + " not in 1..4");
    }
    if (!(u > 0.0)) throw DomainError("derivative requires u > 0");
    double s = (n == 1) ? B.drift_b() : 0.0;
    const double sign = (n % 2 == 1) ? 1.0 : -1.0;
    for (const auto& atom : B.atoms()) {
        s += sign * atom.w * std::pow(atom.t, n) * std::exp(-atom.t * u);
    }
    return s;
}

double derivative_sign_violation(const BernsteinFunction& B, std::span<const double> u_grid,
                                 int max_order, SignConvention convention) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int n = 1; n <= max_order; ++n) {
        const int power = convention == SignConvention::standard ? n - 1 : n;
        const double sign = (power % 2 == 0) ? 1.0 : -1.0;
        for (double u : u_grid) {
            worst = std::max(worst, -sign * derivative(B, u, n));
        }
    }
    return worst;
}

CubicBoundReport cubic_upper_bound_check(const BernsteinFunction& B,
                                         std::span<const double> u_grid) {
    if (u_grid.empty()) throw DomainError("cubic bound grid is empty");
    const double d1 = B.first_derivative_at_zero();
    const double d2 = B.second_derivative_at_zero();
    CubicBoundReport report;
    report.max_violation = -std::numeric_limits<double>::infinity();
    for (double u : u_grid) {
        const double bound = u * u * u / 6.0 + d2 * u * u / 2.0 + d1 * u;
        const double violation = evaluate(B, u) - bound;
        if (violation > report.max_violation) {
            report.max_violation = violation;
            report.argmax_u = u;
        }
        ++report.evaluated;
    }
    return report;
}

double lemma1_margin(const BernsteinFunction& B, std::span<const double> p,
                     std::span<const double> k) {
    require_same_dim(p, k);
    const long double plus = shifted_norm2(p, k, 1.0);
    const long double minus = shifted_norm2(p, k, -1.0);
    const long double pp = dot_ld(p, p);
    const long double kk = dot_ld(k, k);
    const long double lhs =
        0.5L * (B.value_as(plus) + B.value_as(minus) - 2.0L * B.value_as(pp));
    return static_cast<double>(lhs - B.value_as(kk));
}

Lemma1Report lemma1_check(const BernsteinFunction& B, std::span<const RealVector> p_grid,
                          std::span<const RealVector> k_grid) {
    if (p_grid.empty() || k_grid.empty()) throw DomainError("Lemma 1 grids must be nonempty");
    Lemma1Report report;
    report.max_margin = -std::numeric_limits<double>::infinity();
    for (const auto& p : p_grid) {
        for (const auto& k : k_grid) {
            const double m = lemma1_margin(B, p, k);
            if (m > report.max_margin) {
                report.max_margin = m;
                report.argmax_p = p;
                report.argmax_k = k;
            }
            ++report.pairs;
        }
    }
    return report;
}

double exponential_inequality_check(double t, std::span<const double> p,
                                    std::span<const double> k) {
    if (!(t >= 0.0)) throw DomainError("exponential inequality needs t >= 0");
    require_same_dim(p, k);
    const long double tt = t;
    const long double lhs = -std::exp(-shifted_norm2(p, k, 1.0) * tt) -
                            std::exp(-shifted_norm2(p, k, -1.0) * tt) +
                            2.0L * std::exp(-dot_ld(p, p) * tt);
    const long double rhs = -2.0L * std::expm1(-dot_ld(k, k) * tt);
    return static_cast<double>(lhs - rhs);
}

}  // namespace bindcert

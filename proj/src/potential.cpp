#include "bindcert/potential.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bindcert/errors.hpp"
#include "bindcert/fft.hpp"

namespace bindcert {

namespace {

constexpr double kPi = std::numbers::pi;

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563,
                                            0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461,
                                              0.6521451548625461, 0.3478548451374538};

double norm(std::span<const double> r) {
    double s = 0.0;
    for (double c : r) s += c * c;
    return std::sqrt(s);
}

template <class F>
double cell_quadrature(int dim, const std::array<double, 3>& mid, double h, F&& f) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    double sum = 0.0;
    const int n0 = 4, n1 = dim > 1 ? 4 : 1, n2 = dim > 2 ? 4 : 1;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            for (int l = 0; l < n2; ++l) {
                double w = kGaussWeights[static_cast<std::size_t>(i)];
                r[0] = mid[0] + 0.5 * h * kGaussNodes[static_cast<std::size_t>(i)];
                if (dim > 1) {
                    w *= kGaussWeights[static_cast<std::size_t>(j)];
                    r[1] = mid[1] + 0.5 * h * kGaussNodes[static_cast<std::size_t>(j)];
                }
                if (dim > 2) {
                    w *= kGaussWeights[static_cast<std::size_t>(l)];
                    r[2] = mid[2] + 0.5 * h * kGaussNodes[static_cast<std::size_t>(l)];
                }
                sum += w * f(std::span<const double>(r.data(), static_cast<std::size_t>(dim)));
            }
        }
    }
    return sum / std::pow(2.0, dim);
}

// Antiderivatives of 1/|x|; terms whose prefactor vanishes are dropped so the
// corner evaluation stays finite on coordinate planes.
double log_term(double a, double r) { return (a + r > 0.0) ? std::log(a + r) : 0.0; }

double prim2(double x, double y) {
    const double r = std::hypot(x, y);
    if (r == 0.0) return 0.0;
    double s = 0.0;
    if (x != 0.0) s += x * log_term(y, r);
    if (y != 0.0) s += y * log_term(x, r);
    return s;
}

double prim3(double x, double y, double z) {
    const double r = std::sqrt(x * x + y * y + z * z);
    if (r == 0.0) return 0.0;
    double s = 0.0;
    if (y * z != 0.0) s += y * z * log_term(x, r);
    if (z * x != 0.0) s += z * x * log_term(y, r);
    if (x * y != 0.0) s += x * y * log_term(z, r);
    if (x != 0.0) s -= 0.5 * x * x * std::atan(y * z / (x * r));
    if (y != 0.0) s -= 0.5 * y * y * std::atan(z * x / (y * r));
    if (z != 0.0) s -= 0.5 * z * z * std::atan(x * y / (z * r));
    return s;
}

// Cells closer than this many spacings to the singularity use the closed form;
// farther cells are smooth enough for tensor Gauss-Legendre.
constexpr double kNearCells = 4.0;

double singular_cell_average(double coupling, double screening,
                             const std::array<double, 3>& mid, double h, int dim) {
    const double dist = norm(std::span<const double>(mid.data(), static_cast<std::size_t>(dim)));
    auto full = [&](std::span<const double> r) {
        const double rr = norm(r);
        return -coupling * std::exp(-screening * rr) / rr;
    };
    if (dist > kNearCells * h) return cell_quadrature(dim, mid, h, full);

    std::array<double, 3> lo{}, hi{};
    for (int a = 0; a < dim; ++a) {
        lo[static_cast<std::size_t>(a)] = mid[static_cast<std::size_t>(a)] - 0.5 * h;
        hi[static_cast<std::size_t>(a)] = mid[static_cast<std::size_t>(a)] + 0.5 * h;
    }
    double avg = -coupling * coulomb_cell_integral(dim, lo, hi) / std::pow(h, dim);
    if (screening > 0.0) {
        // Bounded remainder -g (e^{-mu r} - 1) / r, limit g mu at r = 0.
        avg += cell_quadrature(dim, mid, h, [&](std::span<const double> r) {
            const double rr = norm(r);
            return rr == 0.0 ? coupling * screening : -coupling * std::expm1(-screening * rr) / rr;
        });
    }
    return avg;
}

}  // namespace

std::string to_string(Sampling s) {
    switch (s) {
        case Sampling::point: return "point";
        case Sampling::cell_average: return "cell_average";
        case Sampling::spectral: return "spectral";
    }
    return "point";
}

Sampling sampling_from_string(const std::string& s) {
    if (s == "point") return Sampling::point;
    if (s == "cell_average") return Sampling::cell_average;
    if (s == "spectral") return Sampling::spectral;
    throw DomainError("unknown sampling mode '" + s + "'");
}

PotentialSpec::PotentialSpec(Variant v, Sampling sampling, std::array<double, 3> center)
    : v_(std::move(v)), sampling_(sampling), center_(center) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Coulomb>) {
                if (p.softening && !(*p.softening >= 0.0)) throw DomainError("softening must be >= 0");
            } else if constexpr (std::is_same_v<T, Yukawa>) {
                if (!(p.range >= 0.0)) throw DomainError("Yukawa range must be >= 0");
                if (p.softening && !(*p.softening >= 0.0)) throw DomainError("softening must be >= 0");
            } else if constexpr (std::is_same_v<T, GaussianWell>) {
                if (!(p.width > 0.0)) throw DomainError("Gaussian width must be > 0");
            } else if constexpr (std::is_same_v<T, SquareWell>) {
                if (!(p.radius > 0.0)) throw DomainError("square well radius must be > 0");
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (p.samples.size() != p.source.size()) {
                    throw DimensionError("tabulated sample count does not match its header");
                }
            }
        },
        v_);
}

std::string PotentialSpec::name() const {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Coulomb>) return "coulomb";
            else if constexpr (std::is_same_v<T, Yukawa>) return "yukawa";
            else if constexpr (std::is_same_v<T, GaussianWell>) return "gaussian";
            else if constexpr (std::is_same_v<T, SquareWell>) return "square";
            else if constexpr (std::is_same_v<T, Harmonic>) return "harmonic";
            else if constexpr (std::is_same_v<T, ConstantPotential>) return "constant";
            else return "tabulated";
        },
        v_);
}

PotentialSpec PotentialSpec::with_sampling(Sampling s) const { return PotentialSpec(v_, s, center_); }

PotentialSpec PotentialSpec::with_center(std::array<double, 3> c) const {
    return PotentialSpec(v_, sampling_, c);
}

bool PotentialSpec::singular() const {
    return std::holds_alternative<Coulomb>(v_) || std::holds_alternative<Yukawa>(v_);
}

double PotentialSpec::at_displacement(std::span<const double> r) const {
    const double rr = norm(r);
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Coulomb> || std::is_same_v<T, Yukawa>) {
                const double eps = p.softening.value_or(0.0);
                const double re = std::sqrt(rr * rr + eps * eps);
                if (re == 0.0) throw SingularityError(name() + " potential sampled at its singularity");
                if constexpr (std::is_same_v<T, Coulomb>) {
                    return -p.charge / re;
                } else {
                    return -p.strength * std::exp(-p.range * re) / re;
                }
            } else if constexpr (std::is_same_v<T, GaussianWell>) {
                return -p.depth * std::exp(-rr * rr / (2.0 * p.width * p.width));
            } else if constexpr (std::is_same_v<T, SquareWell>) {
                return rr < p.radius ? -p.depth : 0.0;
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                return 0.5 * p.omega * p.omega * rr * rr;
            } else if constexpr (std::is_same_v<T, ConstantPotential>) {
                return p.value;
            } else {
                // Nearest source lattice point, periodic in the source box.
                std::array<int, 3> idx{0, 0, 0};
                const double hs = p.source.spacing();
                for (std::size_t a = 0; a < r.size(); ++a) {
                    const double s = (r[a] + 0.5 * p.source.length()) / hs;
                    idx[a] = static_cast<int>(std::lround(s));
                }
                return p.samples[p.source.flatten(idx)];
            }
        },
        v_);
}

double PotentialSpec::fourier_coefficient(std::span<const double> q, int dim, double box_length) const {
    const double qq = norm(q);
    const double R = 0.5 * box_length;
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Coulomb>) {
                if (dim != 3) throw DomainError("spectral Coulomb needs d = 3");
                // Coulomb truncated to the ball |x| < L/2.
                if (qq == 0.0) return -2.0 * kPi * p.charge * R * R;
                return -4.0 * kPi * p.charge * (1.0 - std::cos(qq * R)) / (qq * qq);
            } else if constexpr (std::is_same_v<T, Yukawa>) {
                if (dim != 3) throw DomainError("spectral Yukawa needs d = 3");
                const double mu = p.range;
                if (qq == 0.0) {
                    if (mu == 0.0) return -2.0 * kPi * p.strength * R * R;
                    return -4.0 * kPi * p.strength * (1.0 - std::exp(-mu * R) * (1.0 + mu * R)) / (mu * mu);
                }
                const double tail = std::exp(-mu * R) * (mu * std::sin(qq * R) + qq * std::cos(qq * R));
                return -4.0 * kPi * p.strength * (qq - tail) / (qq * (mu * mu + qq * qq));
            } else if constexpr (std::is_same_v<T, GaussianWell>) {
                const double s2 = p.width * p.width;
                return -p.depth * std::pow(2.0 * kPi * s2, 0.5 * dim) * std::exp(-0.5 * s2 * qq * qq);
            } else if constexpr (std::is_same_v<T, ConstantPotential>) {
                return qq == 0.0 ? p.value * std::pow(box_length, dim) : 0.0;
            } else {
                throw DomainError("no closed-form Fourier coefficients for " + name() + " potential");
            }
        },
        v_);
}

std::array<double, 3> minimum_image(const GridSpec& grid, const std::array<double, 3>& x,
                                    const std::array<double, 3>& c) {
    std::array<double, 3> r{0.0, 0.0, 0.0};
    const double L = grid.length();
    for (int a = 0; a < grid.dim(); ++a) {
        const auto i = static_cast<std::size_t>(a);
        double d = x[i] - c[i];
        d -= L * std::floor(d / L + 0.5);
        r[i] = d;
    }
    return r;
}

double coulomb_cell_integral(int dim, const std::array<double, 3>& lo, const std::array<double, 3>& hi) {
    if (dim == 1) {
        if (lo[0] <= 0.0 && hi[0] >= 0.0) {
            throw SingularityError("1/|x| is not integrable across the origin in one dimension");
        }
        return std::abs(std::log(std::abs(hi[0]) / std::abs(lo[0])));
    }
    double s = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const double x = a ? hi[0] : lo[0];
            const double y = b ? hi[1] : lo[1];
            if (dim == 2) {
                s += ((a + b) % 2 == 0 ? 1.0 : -1.0) * prim2(x, y);
                continue;
            }
            for (int c = 0; c < 2; ++c) {
                const double z = c ? hi[2] : lo[2];
                s += ((a + b + c) % 2 == 1 ? 1.0 : -1.0) * prim3(x, y, z);
            }
        }
    }
    return s;
}

LatticeField potential_on_grid(const PotentialSpec& V, const GridSpec& grid) {
    LatticeField field{grid, std::vector<double>(grid.size())};
    const int d = grid.dim();
    const auto dim = static_cast<std::size_t>(d);
    const double h = grid.spacing();

    if (V.sampling() == Sampling::spectral) {
        // Fourier series restricted to the grid's own band.
        const Fft fft(d, grid.points());
        std::vector<Complex> coeff(grid.size()), out(grid.size());
        const double vol = std::pow(grid.length(), d);
        for (std::size_t f = 0; f < grid.size(); ++f) {
            const auto q = grid.momentum_at(f);
            double phase = 0.0;
            for (std::size_t a = 0; a < dim; ++a) phase += q[a] * (V.center()[a] + 0.5 * grid.length());
            coeff[f] = V.fourier_coefficient(std::span<const double>(q.data(), dim), d, grid.length()) / vol *
                       std::polar(1.0, -phase);
        }
        // x_j = -L/2 + j h  =>  e^{i q (x_j - c)} = e^{-i q (c + L/2)} e^{2 pi i n j / N}.
        std::vector<double> re(grid.size()), im(grid.size());
        for (std::size_t f = 0; f < grid.size(); ++f) {
            re[f] = coeff[f].real();
            im[f] = coeff[f].imag();
        }
        re = centered_to_fft_order(grid, re);
        im = centered_to_fft_order(grid, im);
        for (std::size_t f = 0; f < grid.size(); ++f) coeff[f] = {re[f], im[f]};
        fft.backward(coeff, out);
        for (std::size_t f = 0; f < grid.size(); ++f) field.values[f] = out[f].real();
        return field;
    }

    if (const auto* t = std::get_if<Tabulated>(&V.variant()); t && t->source.dim() != d) {
        throw DimensionError("tabulated potential dimension does not match the grid");
    }
    for (std::size_t f = 0; f < grid.size(); ++f) {
        const auto r = minimum_image(grid, grid.position_at(f), V.center());
        const std::span<const double> rs(r.data(), dim);
        if (V.sampling() == Sampling::point) {
            if (V.singular()) {
                // Unset softening defaults to one lattice spacing.
                PotentialSpec softened = V;
                if (const auto* c = std::get_if<Coulomb>(&V.variant()); c && !c->softening) {
                    softened = PotentialSpec(Coulomb{c->charge, h}, V.sampling(), V.center());
                } else if (const auto* y = std::get_if<Yukawa>(&V.variant()); y && !y->softening) {
                    softened = PotentialSpec(Yukawa{y->strength, y->range, h}, V.sampling(), V.center());
                }
                field.values[f] = softened.at_displacement(rs);
            } else {
                field.values[f] = V.at_displacement(rs);
            }
            continue;
        }
        // cell_average
        if (const auto* c = std::get_if<Coulomb>(&V.variant())) {
            field.values[f] = singular_cell_average(c->charge, 0.0, r, h, d);
        } else if (const auto* y = std::get_if<Yukawa>(&V.variant())) {
            field.values[f] = singular_cell_average(y->strength, y->range, r, h, d);
        } else {
            field.values[f] = cell_quadrature(d, r, h, [&](std::span<const double> s) { return V.at_displacement(s); });
        }
    }
    return field;
}

LatticeField spectral_potential_doubled(const PotentialSpec& V, const GridSpec& grid) {
    const GridSpec fine(grid.dim(), grid.length(), 2 * grid.points());
    return potential_on_grid(V.with_sampling(Sampling::spectral), fine);
}

Tabulated parse_tabulated(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    if (!std::getline(in, header)) throw DomainError("tabulated data: missing header");
    std::istringstream hs(header);
    int d = 0, n = 0;
    double L = 0.0;
    if (!(hs >> d >> L >> n)) throw DomainError("tabulated data: header must be 'd L N'");
    const GridSpec grid(d, L, n);
    std::vector<double> values;
    values.reserve(grid.size());
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        double v = 0.0;
        if (!(ls >> v)) throw DomainError("tabulated data: bad value on line " + std::to_string(lineno));
        values.push_back(v);
    }
    if (values.size() != grid.size()) {
        throw DimensionError("tabulated data: expected " + std::to_string(grid.size()) + " values, got " +
                             std::to_string(values.size()));
    }
    return {grid, std::move(values)};
}

Tabulated read_tabulated(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open tabulated file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tabulated(ss.str());
}

void write_tabulated(const std::string& path, const GridSpec& grid, const std::vector<double>& values) {
    if (values.size() != grid.size()) throw DimensionError("values do not match grid");
    std::ofstream out(path);
    if (!out) throw DomainError("cannot write '" + path + "'");
    out.imbue(std::locale::classic());
    out.precision(17);
    out << grid.dim() << ' ' << grid.length() << ' ' << grid.points() << '\n';
    for (double v : values) out << v << '\n';
}

}  // namespace bindcert

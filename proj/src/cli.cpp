#include "bindcert/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "bindcert/errors.hpp"
#include "bindcert/hash.hpp"
#include "bindcert/random.hpp"

namespace bindcert::cli {

namespace {

using report::CertificateRecord;
using report::Json;

onebody::SolverOptions solver_options(const config::SolverSection& s) {
    onebody::SolverOptions o;
    o.tol = s.tol;
    o.max_iter = s.max_iter;
    o.seed = s.seed;
    o.basis_size = s.basis_size;
    return o;
}

LanczosOptions lanczos_options(const config::SolverSection& s) {
    LanczosOptions o;
    o.tol = s.tol;
    o.max_iter = s.max_iter;
    o.seed = s.seed;
    o.basis_size = s.basis_size;
    return o;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

std::string vector_text(const RealVector& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += report::format_double(v[i]);
    }
    return s + "]";
}

RealVector ball_point(Rng& rng, int dim, double radius) {
    RealVector v(static_cast<std::size_t>(dim));
    for (;;) {
        double r2 = 0.0;
        for (auto& x : v) {
            x = rng.uniform(-radius, radius);
            r2 += x * x;
        }
        if (r2 <= radius * radius) return v;
    }
}

int combine(int a, int b) {
    // Config errors dominate failed checks, which dominate non-convergence.
    auto rank = [](int c) { return c == kConfigError ? 3 : c == kCheckFailed ? 2 : c == kUnconverged ? 1 : 0; };
    return rank(a) >= rank(b) ? a : b;
}

}  // namespace

void apply_overrides(config::JobConfig& cfg, const RunOptions& options) {
    if (options.seed) {
        cfg.solver.seed = *options.seed;
        cfg.resolved["solver"]["seed"] = *options.seed;
    }
    if (options.out_dir) {
        cfg.output.dir = *options.out_dir;
        cfg.resolved["output"]["dir"] = *options.out_dir;
    }
    if (options.format) {
        require(*options.format == "json" || *options.format == "csv", "format must be json or csv");
        cfg.output.format = *options.format;
        cfg.resolved["output"]["format"] = *options.format;
    }
}

CommandResult solve_onebody(const config::JobConfig& cfg) {
    require(cfg.kinetic.has_value(), "solve-onebody needs a kinetic section");
    require(cfg.potential.has_value(), "solve-onebody needs a potential section");
    require(!cfg.grids.empty(), "solve-onebody needs grid or grids");
    const auto options = solver_options(cfg.solver);

    CommandResult out;
    auto rec = report::make_record("binding", "solve_onebody",
                                   cfg.echo({"kinetic", "bernstein", "potential", "grid", "grids", "solver"}));
    double e0 = 0.0;
    double residual = 0.0;
    bool converged = true;
    std::uint64_t checksum = 0;
    if (cfg.grids.size() == 1) {
        const auto gs = cfg.solver.box_control
                            ? onebody::ground_state_box_controlled(*cfg.kinetic, *cfg.potential, cfg.grids[0], options)
                            : onebody::ground_state(*cfg.kinetic, *cfg.potential, cfg.grids[0], options);
        out.convergence.push_back(gs.result);
        e0 = gs.result.eigenvalue;
        residual = gs.result.residual;
        converged = gs.result.converged;
        checksum = gs.result.checksum;
        out.notes = gs.result.notes;
        rec.put("L", gs.result.grid.length());
        rec.put("N", static_cast<std::int64_t>(gs.result.grid.points()));
        rec.put("e0_finest", e0);
        rec.put("extrapolated", false);
        rec.put("boundary_mass", onebody::boundary_mass(gs.result.grid, gs.vector));
    } else {
        const auto study = onebody::converge_study(*cfg.kinetic, *cfg.potential, cfg.grids, options,
                                                   cfg.solver.richardson);
        out.convergence = study.rows;
        for (const auto& r : study.rows) {
            converged = converged && r.converged;
            residual = std::max(residual, r.residual);
        }
        const auto& last = study.rows.back();
        e0 = study.extrapolated.value_or(last.eigenvalue);
        checksum = last.checksum;
        out.notes = study.warnings;
        rec.put("L", last.grid.length());
        rec.put("N", static_cast<std::int64_t>(last.grid.points()));
        rec.put("e0_finest", last.eigenvalue);
        rec.put("extrapolated", study.extrapolated.has_value());
        rec.put("nested_monotone", study.nested_monotone);
    }
    const auto cert = onebody::binding_certificate(e0, cfg.solver.binding_tol,
                                                   "lattice " + hex_digest(checksum));
    rec.put("e0", cert.e0);
    rec.put("lower_bound", cert.lower_bound);
    rec.put("binding_positive", cert.binding_positive);
    rec.put("residual", residual);
    rec.put("converged", converged);
    rec.put("checksum", hex_digest(checksum));
    rec.tolerance("binding_tol", cfg.solver.binding_tol);
    rec.tolerance("solver_tol", cfg.solver.tol);
    rec.pass = converged;
    out.records.push_back(std::move(rec));
    out.exit_code = converged ? kOk : kUnconverged;
    return out;
}

Lemma1Batch lemma1_batch(const config::Lemma1Section& s, std::uint64_t seed,
                         const std::optional<BernsteinFunction>& fixed) {
    Lemma1Batch out;
    out.max_margin = -std::numeric_limits<double>::infinity();
    Rng rng(seed);
    const double sign = s.sign_flipped ? -1.0 : 1.0;
    for (int i = 0; i < s.samples; ++i) {
        BernsteinFunction B = fixed ? *fixed : BernsteinFunction::linear(0.0);
        if (!fixed) {
            std::vector<LevyAtom> atoms(static_cast<std::size_t>(rng.pick(0, s.max_atoms)));
            for (auto& a : atoms) a = {rng.positive(s.max_rate), rng.positive(s.max_weight)};
            const double a0 = rng.unit() < 0.25 ? 0.0 : rng.uniform(0.0, 1.0);
            B = BernsteinFunction(a0, rng.uniform(0.0, 1.0), atoms);
        }
        const int d = rng.pick(1, 3);
        RealVector p = ball_point(rng, d, s.radius);
        RealVector k = ball_point(rng, d, s.radius);
        // Degenerate configurations where the inequality is tight or terms cancel.
        switch (i % 16) {
            case 1: std::fill(k.begin(), k.end(), 0.0); break;
            case 2: std::fill(p.begin(), p.end(), 0.0); break;
            case 3: k = p; break;
            default: break;
        }
        const double m = sign * lemma1_margin(B, p, k);
        if (m > out.max_margin) {
            out.max_margin = m;
            out.argmax_p = p;
            out.argmax_k = k;
        }
        ++out.samples;
    }
    out.exp_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < s.exp_samples; ++i) {
        const double t = rng.positive(s.max_rate);
        const int d = rng.pick(1, 3);
        const RealVector p = ball_point(rng, d, s.radius);
        RealVector k = ball_point(rng, d, s.radius);
        if (i % 16 == 1) std::fill(k.begin(), k.end(), 0.0);
        const double v = sign * exponential_inequality_check(t, p, k);
        if (v > out.exp_max) {
            out.exp_max = v;
            out.exp_argmax_t = t;
        }
        if (i % 100 == 0) {
            RealVector ps = p, ks = k;
            for (auto& x : ps) x *= std::sqrt(t);
            for (auto& x : ks) x *= std::sqrt(t);
            const double scaled = sign * exponential_inequality_check(1.0, ps, ks);
            out.scaling_defect = std::max(out.scaling_defect, std::abs(v - scaled));
        }
        ++out.exp_samples;
    }
    if (out.samples == 0) out.max_margin = 0.0;
    if (out.exp_samples == 0) out.exp_max = 0.0;
    return out;
}

CommandResult verify_lemma1(const config::JobConfig& cfg) {
    const config::Lemma1Section section = cfg.lemma1.value_or(config::Lemma1Section{});
    const auto batch = lemma1_batch(section, cfg.solver.seed, cfg.bernstein);
    const Json inputs = cfg.echo({"bernstein", "lemma1", "solver"});
    CommandResult out;

    auto lemma = report::make_record("lemma1", "lemma1", inputs);
    lemma.put("samples", static_cast<std::int64_t>(batch.samples));
    lemma.put("max_margin", batch.max_margin);
    lemma.put("argmax_p", vector_text(batch.argmax_p));
    lemma.put("argmax_k", vector_text(batch.argmax_k));
    lemma.put("comparator", section.sign_flipped ? "sign_flipped" : "standard");
    lemma.tolerance("max_margin", kLemma1Tolerance);
    lemma.pass = batch.max_margin <= kLemma1Tolerance;

    auto expo = report::make_record("lemma1", "exponential_inequality", inputs);
    expo.put("samples", static_cast<std::int64_t>(batch.exp_samples));
    expo.put("max_value", batch.exp_max);
    expo.put("argmax_t", batch.exp_argmax_t);
    expo.put("scaling_defect", batch.scaling_defect);
    expo.tolerance("max_value", 0.0);
    expo.tolerance("scaling_defect", 1e-12);
    expo.pass = batch.exp_max <= 0.0 && batch.scaling_defect <= 1e-12;

    const bool ok = lemma.pass && expo.pass;
    out.records.push_back(std::move(lemma));
    out.records.push_back(std::move(expo));

    if (cfg.bernstein) {
        // The cubic comparison bound is reported, never asserted.
        std::vector<double> grid(101);
        for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.1 * static_cast<double>(i);
        const auto cubic = cubic_upper_bound_check(*cfg.bernstein, grid);
        const std::vector<double> u_grid(grid.begin() + 1, grid.end());
        auto rec = report::make_record("lemma1", "bernstein_shape", inputs);
        rec.put("cubic_bound_max_violation", cubic.max_violation);
        rec.put("cubic_bound_argmax_u", cubic.argmax_u);
        rec.put("derivative_sign_violation", derivative_sign_violation(*cfg.bernstein, u_grid, 4, SignConvention::standard));
        rec.tolerance("derivative_sign_violation", 1e-12);
        rec.pass = rec.number("derivative_sign_violation") <= 1e-12;
        out.records.push_back(std::move(rec));
    }
    out.exit_code = ok ? kOk : kCheckFailed;
    return out;
}

Json describe(const fock::NelsonInstance& in) {
    Json j = Json::object();
    j["L"] = in.grid.length();
    j["N"] = in.grid.points();
    j["n_max"] = in.trunc.n_max;
    j["truncation"] = in.ordering == fock::PolynomialTruncation::compressed ? "compressed" : "matrix_polynomial";
    Json modes = Json::array();
    for (const auto& m : in.trunc.modes) {
        modes.push_back(Json{{"k", m.k}, {"g_re", m.g.real()}, {"g_im", m.g.imag()}, {"omega", m.omega}});
    }
    j["modes"] = modes;
    j["P"] = in.P;
    Json atoms = Json::array();
    for (const auto& a : in.B.atoms()) atoms.push_back(Json{{"t", a.t}, {"w", a.w}});
    j["bernstein"] = Json{{"a", in.B.drift_a()}, {"b", in.B.drift_b()}, {"atoms", atoms}};
    Json v = Json::object();
    v["name"] = in.V.name();
    v["sampling"] = to_string(in.V.sampling());
    v["center"] = in.V.center();
    std::visit(
        [&v](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, GaussianWell>) {
                v["depth"] = p.depth;
                v["width"] = p.width;
            } else if constexpr (std::is_same_v<T, SquareWell>) {
                v["depth"] = p.depth;
                v["radius"] = p.radius;
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                v["omega"] = p.omega;
            } else if constexpr (std::is_same_v<T, ConstantPotential>) {
                v["value"] = p.value;
            } else if constexpr (std::is_same_v<T, Coulomb>) {
                v["charge"] = p.charge;
            } else if constexpr (std::is_same_v<T, Yukawa>) {
                v["strength"] = p.strength;
                v["range"] = p.range;
            } else {
                v["samples"] = p.samples.size();
            }
        },
        in.V.variant());
    j["potential"] = v;
    j["dim_cap"] = in.dim_cap;
    return j;
}

std::vector<fock::NelsonInstance> theorem_instances(const config::JobConfig& cfg) {
    require(cfg.nelson.has_value(), "verify-theorem needs a nelson section");
    const auto& n = *cfg.nelson;
    if (!n.random) return {n.instance};
    std::vector<fock::NelsonInstance> out;
    for (int i = 0; i < n.random->count; ++i) {
        auto opt = n.random->options;
        const int every = n.random->decoupled_every;
        opt.decoupled = every > 0 && i % every == every - 1;
        out.push_back(fock::random_instance(mix_seed(cfg.solver.seed, static_cast<std::uint64_t>(i)), opt));
    }
    return out;
}

CommandResult verify_theorem(const config::JobConfig& cfg) {
    const auto instances = theorem_instances(cfg);
    const auto lo = lanczos_options(cfg.solver);
    CommandResult out;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const auto& in = instances[i];
        Json inputs = Json::object();
        inputs["instance"] = describe(in);
        inputs["solver"] = cfg.resolved["solver"];
        const std::string name = "instance_" + std::to_string(i);

        auto hyp = report::make_record("hypothesis", name, inputs);
        hyp.tolerance("h2", fock::kH2Tolerance);
        hyp.tolerance("h3", kH3Tolerance);
        try {
            const auto rep = fock::theorem_verify(in, lo);
            hyp.put("h2", rep.h2);
            hyp.put("h3", rep.h3);
            hyp.pass = true;
            out.records.push_back(std::move(hyp));

            auto rec = report::make_record("theorem", name, inputs);
            rec.put("dim", static_cast<std::int64_t>(in.dim()));
            rec.put("E0", rep.E0);
            rec.put("EV", rep.EV);
            rec.put("e0", rep.e0);
            rec.put("slack", rep.slack);
            rec.put("residual0", rep.pair.residual0);
            rec.put("residualV", rep.pair.residualV);
            if (rep.pair.dense_E0) {
                rec.put("dense_E0_defect", std::abs(*rep.pair.dense_E0 - rep.E0));
                rec.put("dense_EV_defect", std::abs(*rep.pair.dense_EV - rep.EV));
            }
            rec.put("trial_norm", rep.trial.norm);
            rec.put("trial_kinetic_lhs", rep.trial.kinetic_lhs);
            rec.put("trial_kinetic_rhs", rep.trial.kinetic_rhs);
            rec.put("trial_kinetic_margin", rep.trial.kinetic_margin());
            rec.put("trial_potential_lhs", rep.trial.potential_lhs);
            rec.put("trial_potential_rhs", rep.trial.potential_rhs);
            rec.put("energy_bound", rep.trial.energy_bound);
            rec.put("decoupled", rep.decoupled);
            rec.put("continuum_unbounded", rep.continuum_unbounded);
            rec.put("converged", rep.converged);
            rec.put("checksum", hex_digest(rep.checksum));
            rec.tolerance("slack", -fock::kSlackTolerance);
            rec.tolerance("trial_norm", fock::kTrialNormTolerance);
            rec.tolerance("trial_kinetic_margin", fock::kTrialKineticTolerance);
            rec.tolerance("trial_potential", fock::kTrialPotentialTolerance);
            bool pass = rep.certified();
            if (rep.decoupled) {
                rec.tolerance("decoupled_slack", 1e-10);
                pass = pass && std::abs(rep.slack) <= 1e-10;
            }
            rec.pass = pass;
            out.records.push_back(std::move(rec));
            if (!rep.converged) {
                out.exit_code = combine(out.exit_code, kUnconverged);
            } else if (!pass) {
                out.exit_code = combine(out.exit_code, kCheckFailed);
            }
        } catch (const HypothesisError& e) {
            hyp.put("h2", e.h2);
            hyp.put("h3", e.h3);
            hyp.put("reason", std::string(e.what()));
            hyp.pass = false;
            out.records.push_back(std::move(hyp));
            out.exit_code = combine(out.exit_code, kCheckFailed);
        }
    }
    return out;
}

CommandResult sweep(const config::JobConfig& cfg, int jobs) {
    require(cfg.sweep.has_value(), "sweep needs a sweep section");
    const auto& s = *cfg.sweep;
    std::vector<CommandResult> parts(s.values.size());
    std::vector<std::string> errors(s.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < s.values.size();) {
            try {
                auto job = config::with_override(cfg, s.parameter, s.values[i]);
                job.solver.seed = cfg.solver.seed;
                job.resolved["solver"]["seed"] = cfg.solver.seed;
                parts[i] = solve_onebody(job);
                for (auto& r : parts[i].records) r.name = s.parameter + "=" + report::format_double(s.values[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const int n = std::clamp(jobs, 1, static_cast<int>(s.values.size()));
    {
        std::vector<std::jthread> pool;
        for (int t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    CommandResult out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (!errors[i].empty()) throw ConfigError("sweep value " + report::format_double(s.values[i]) + ": " + errors[i]);
        out.exit_code = combine(out.exit_code, parts[i].exit_code);
        for (auto& r : parts[i].records) out.records.push_back(std::move(r));
        for (auto& r : parts[i].convergence) out.convergence.push_back(std::move(r));
        for (auto& note : parts[i].notes) out.notes.push_back(std::move(note));
    }
    return out;
}

std::string render(const CommandResult& result, const std::string& format) {
    if (format == "csv") {
        if (result.convergence.empty()) throw ConfigError("csv output is only available for convergence tables");
        return report::emit_convergence_csv(result.convergence);
    }
    return report::emit_json(result.records) + "\n";
}

int run(const std::string& command, const std::string& config_path, const RunOptions& options, std::ostream& log) {
    CommandResult result;
    config::JobConfig cfg;
    try {
        cfg = config::load_config(config_path);
        apply_overrides(cfg, options);
        if (command == "solve-onebody") {
            result = solve_onebody(cfg);
        } else if (command == "verify-lemma1") {
            result = verify_lemma1(cfg);
        } else if (command == "verify-theorem") {
            result = verify_theorem(cfg);
        } else if (command == "sweep") {
            result = sweep(cfg, options.jobs);
        } else {
            throw ConfigError("unknown command '" + command + "'");
        }
        const std::string body = render(result, cfg.output.format);
        std::filesystem::create_directories(cfg.output.dir);
        const auto path = std::filesystem::path(cfg.output.dir) / (cfg.output.stem + "." + cfg.output.format);
        std::ofstream(path, std::ios::binary) << body;
        log << command << ": wrote " << path.string() << '\n';
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DomainError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const SizeError& e) {
        log << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NumericError& e) {
        log << "numeric failure: " << e.what() << '\n';
        return kUnconverged;
    }
    for (const auto& r : result.records) {
        log << "  " << r.kind << ' ' << r.name << ": " << (r.pass ? "pass" : "FAIL") << '\n';
    }
    for (const auto& note : result.notes) log << "  note: " << note << '\n';
    return result.exit_code;
}

}  // namespace bindcert::cli

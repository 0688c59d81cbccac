#include "bindcert/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "bindcert/errors.hpp"

namespace bindcert::config {

namespace {

using report::Json;

int line_of(const YAML::Node& n) { return n.Mark().is_null() ? 0 : n.Mark().line + 1; }

template <typename T>
T convert(const YAML::Node& n, const std::string& where) {
    if (!n.IsScalar()) throw ConfigError(where + " must be a scalar", line_of(n));
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        throw ConfigError(where + " has the wrong type", line_of(n));
    }
}

/// One mapping node; every key read is recorded so leftovers can be rejected.
class Section {
public:
    Section(const YAML::Node& node, std::string name) : node_(node), name_(std::move(name)) {
        if (!node_.IsMap()) throw ConfigError("section '" + name_ + "' must be a mapping", line_of(node_));
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return static_cast<bool>(node_[key]);
    }

    YAML::Node raw(const std::string& key) {
        seen_.insert(key);
        return node_[key];
    }

    template <typename T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        const YAML::Node n = node_[key];
        T v = n ? convert<T>(n, name_ + "." + key) : fallback;
        echo_[key] = v;
        return v;
    }

    template <typename T>
    T required(const std::string& key) {
        seen_.insert(key);
        const YAML::Node n = node_[key];
        if (!n) throw ConfigError("missing required key '" + name_ + "." + key + "'", line_of(node_));
        T v = convert<T>(n, name_ + "." + key);
        echo_[key] = v;
        return v;
    }

    template <typename T>
    std::vector<T> list(const std::string& key, std::vector<T> fallback) {
        seen_.insert(key);
        const YAML::Node n = node_[key];
        std::vector<T> out = std::move(fallback);
        if (n) {
            if (!n.IsSequence()) throw ConfigError(name_ + "." + key + " must be a list", line_of(n));
            out.clear();
            for (const auto& item : n) out.push_back(convert<T>(item, name_ + "." + key));
        }
        echo_[key] = out;
        return out;
    }

    void check(bool ok, const std::string& what, const std::string& key = {}) const {
        if (ok) return;
        const YAML::Node n = key.empty() ? node_ : node_[key];
        throw ConfigError(name_ + (key.empty() ? "" : "." + key) + ": " + what, line_of(n ? n : node_));
    }

    /// Rejects keys that were never read.
    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) {
                throw ConfigError("unknown key '" + key + "' in section '" + name_ + "'", line_of(kv.first));
            }
        }
    }

    Json& echo() { return echo_; }
    int line() const { return line_of(node_); }

private:
    YAML::Node node_;
    std::string name_;
    std::set<std::string> seen_;
    Json echo_ = Json::object();
};

template <typename F>
auto guarded(int line, F&& f) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(e.what(), line);
    }
}

BernsteinFunction parse_bernstein(Section& s) {
    const auto preset = s.get<std::string>("preset", "explicit");
    return guarded(s.line(), [&] {
        if (preset == "linear") return BernsteinFunction::linear(s.get<double>("b", 1.0));
        if (preset == "one_minus_exp") {
            const double t = s.get<double>("t", 1.0);
            return BernsteinFunction::one_minus_exp(t, s.get<double>("w", 1.0));
        }
        if (preset == "sqrt_shifted") {
            const double m = s.get<double>("mass", 1.0);
            return BernsteinFunction::sqrt_shifted(m, s.get<int>("n_atoms", 64));
        }
        s.check(preset == "explicit", "unknown preset '" + preset + "'", "preset");
        const double a = s.get<double>("a", 0.0);
        const double b = s.get<double>("b", 0.0);
        std::vector<LevyAtom> atoms;
        Json echo = Json::array();
        if (s.has("atoms")) {
            const YAML::Node list = s.raw("atoms");
            s.check(list.IsSequence(), "must be a list of {t, w}", "atoms");
            for (const auto& item : list) {
                Section atom(item, "bernstein.atoms");
                const double t = atom.required<double>("t");
                const double w = atom.required<double>("w");
                atom.finish();
                atoms.push_back({t, w});
                echo.push_back(atom.echo());
            }
        }
        s.echo()["atoms"] = echo;
        return BernsteinFunction(a, b, atoms);
    });
}

PotentialSpec parse_potential(Section& s, int dim) {
    const auto type = s.required<std::string>("type");
    const bool singular = type == "coulomb" || type == "yukawa";
    const auto sampling_name =
        s.get<std::string>("sampling", singular && dim == 3 ? "cell_average" : "point");
    Sampling sampling{};
    guarded(s.line(), [&] { sampling = sampling_from_string(sampling_name); return 0; });
    auto center_list = s.list<double>("center", {0.0, 0.0, 0.0});
    s.check(center_list.size() <= 3, "at most three components", "center");
    std::array<double, 3> center{0.0, 0.0, 0.0};
    std::copy(center_list.begin(), center_list.end(), center.begin());

    auto softening = [&]() -> std::optional<double> {
        if (!s.has("softening")) return std::nullopt;
        return s.get<double>("softening", 0.0);
    };
    PotentialSpec::Variant v;
    if (type == "coulomb") {
        Coulomb c{s.get<double>("charge", 1.0), std::nullopt};
        c.softening = softening();
        v = c;
    } else if (type == "yukawa") {
        Yukawa y{s.get<double>("strength", 1.0), s.get<double>("range", 1.0), std::nullopt};
        y.softening = softening();
        v = y;
    } else if (type == "gaussian") {
        const double depth = s.get<double>("depth", 1.0);
        v = GaussianWell{depth, s.get<double>("width", 1.0)};
    } else if (type == "square") {
        const double depth = s.get<double>("depth", 1.0);
        v = SquareWell{depth, s.get<double>("radius", 1.0)};
    } else if (type == "harmonic") {
        v = Harmonic{s.get<double>("omega", 1.0)};
    } else if (type == "constant" || type == "zero") {
        v = ConstantPotential{type == "zero" ? 0.0 : s.get<double>("value", 0.0)};
    } else if (type == "tabulated") {
        const auto path = s.required<std::string>("file");
        v = guarded(s.line(), [&] { return read_tabulated(path); });
    } else {
        s.check(false, "unknown potential type '" + type + "'", "type");
    }
    return guarded(s.line(), [&] { return PotentialSpec(v, sampling, center); });
}

GridSpec parse_grid(Section& s) {
    const int dim = s.get<int>("dim", 1);
    const double L = s.required<double>("L");
    const int N = s.required<int>("N");
    s.check(dim >= 1 && dim <= 3, "must be 1, 2 or 3", "dim");
    s.check(L > 0.0, "must be positive", "L");
    s.check(N >= 2 && N % 2 == 0, "must be an even number >= 2", "N");
    return guarded(s.line(), [&] { return GridSpec(dim, L, N); });
}

fock::NelsonInstance parse_nelson_instance(Section& s, std::optional<RandomNelson>& random) {
    fock::NelsonInstance in;
    const double L = s.get<double>("L", 8.0);
    const int N = s.get<int>("N", 16);
    s.check(L > 0.0, "must be positive", "L");
    s.check(N >= 2 && N % 2 == 0, "must be an even number >= 2", "N");
    in.grid = guarded(s.line(), [&] { return GridSpec(1, L, N); });
    in.trunc.n_max = s.get<int>("n_max", 2);
    s.check(in.trunc.n_max >= 1, "must be at least 1", "n_max");
    in.P = s.list<double>("P", {});
    in.dim_cap = s.get<std::size_t>("dim_cap", 200000);
    const auto truncation = s.get<std::string>("truncation", "compressed");
    s.check(truncation == "compressed" || truncation == "matrix_polynomial",
            "expected compressed or matrix_polynomial", "truncation");
    in.ordering = truncation == "compressed" ? fock::PolynomialTruncation::compressed
                                             : fock::PolynomialTruncation::matrix_polynomial;
    Json modes = Json::array();
    if (s.has("modes")) {
        const YAML::Node list = s.raw("modes");
        s.check(list.IsSequence(), "must be a list", "modes");
        for (const auto& item : list) {
            Section m(item, "nelson.modes");
            fock::FieldMode mode;
            m.check(m.has("k") != m.has("k_index"), "give exactly one of k and k_index");
            if (m.has("k_index")) {
                mode.k = in.grid.momentum_quantum() * m.get<int>("k_index", 0);
            } else {
                mode.k = m.get<double>("k", 0.0);
            }
            const double g = m.get<double>("g", 0.0);
            const double phase = m.get<double>("g_phase", 0.0);
            mode.g = std::polar(g, phase);
            mode.omega = m.get<double>("omega", 1.0);
            m.check(mode.omega >= 0.0, "must be non-negative", "omega");
            m.finish();
            modes.push_back(m.echo());
            in.trunc.modes.push_back(mode);
        }
    }
    s.echo()["modes"] = modes;
    if (s.has("random")) {
        Section r(s.raw("random"), "nelson.random");
        RandomNelson rn;
        rn.count = r.get<int>("count", rn.count);
        rn.decoupled_every = r.get<int>("decoupled_every", rn.decoupled_every);
        auto& o = rn.options;
        o.max_atoms = r.get<int>("max_atoms", o.max_atoms);
        o.max_modes = r.get<int>("max_modes", o.max_modes);
        o.max_n_max = r.get<int>("max_n_max", o.max_n_max);
        o.max_points = r.get<int>("max_points", o.max_points);
        o.max_degree = r.get<int>("max_degree", o.max_degree);
        o.max_dim = r.get<std::size_t>("max_dim", o.max_dim);
        r.check(rn.count >= 1, "must be positive", "count");
        r.check(o.max_dim <= 200000, "must not exceed 200000", "max_dim");
        r.finish();
        s.echo()["random"] = r.echo();
        random = rn;
    }
    return in;
}

JobConfig parse_root(const YAML::Node& root, std::string source) {
    JobConfig cfg;
    cfg.source = std::move(source);
    if (!root || root.IsNull()) throw ConfigError("empty job document", 1);
    if (!root.IsMap()) throw ConfigError("job document must be a mapping", line_of(root));

    static const std::set<std::string> known{"kinetic", "potential", "bernstein", "grid",  "grids",
                                             "solver",  "nelson",    "lemma1",    "sweep", "output"};
    for (const auto& kv : root) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) throw ConfigError("unknown section '" + key + "'", line_of(kv.first));
    }
    if (root["grid"] && root["grids"]) throw ConfigError("give either grid or grids", line_of(root["grids"]));

    if (root["grid"]) {
        Section s(root["grid"], "grid");
        cfg.grids.push_back(parse_grid(s));
        s.finish();
        cfg.resolved["grid"] = s.echo();
    } else if (root["grids"]) {
        const YAML::Node list = root["grids"];
        if (!list.IsSequence() || list.size() == 0) throw ConfigError("grids must be a non-empty list", line_of(list));
        Json echo = Json::array();
        for (const auto& item : list) {
            Section s(item, "grids");
            cfg.grids.push_back(parse_grid(s));
            s.finish();
            echo.push_back(s.echo());
        }
        cfg.resolved["grids"] = echo;
    }
    const int dim = cfg.grids.empty() ? 1 : cfg.grids.front().dim();

    if (root["bernstein"]) {
        Section s(root["bernstein"], "bernstein");
        cfg.bernstein = parse_bernstein(s);
        s.finish();
        cfg.resolved["bernstein"] = s.echo();
    }
    if (root["kinetic"]) {
        Section s(root["kinetic"], "kinetic");
        const auto type = s.get<std::string>("type", "nonrelativistic");
        if (type == "bernstein") {
            s.check(cfg.bernstein.has_value(), "type bernstein needs a bernstein section", "type");
            cfg.kinetic = guarded(s.line(), [&] { return KineticProfile::bernstein(*cfg.bernstein); });
        } else {
            const double mass = s.get<double>("mass", 1.0);
            if (type == "nonrelativistic") {
                cfg.kinetic = guarded(s.line(), [&] { return KineticProfile::nonrelativistic(mass); });
            } else {
                s.check(type == "semirelativistic", "unknown kinetic type '" + type + "'", "type");
                cfg.kinetic = guarded(s.line(), [&] { return KineticProfile::semirelativistic(mass); });
            }
        }
        s.finish();
        cfg.resolved["kinetic"] = s.echo();
    }
    if (root["potential"]) {
        Section s(root["potential"], "potential");
        cfg.potential = parse_potential(s, root["nelson"] && cfg.grids.empty() ? 1 : dim);
        s.finish();
        cfg.resolved["potential"] = s.echo();
    }
    {
        SolverSection& o = cfg.solver;
        Section s(root["solver"] ? root["solver"] : YAML::Node(YAML::NodeType::Map), "solver");
        o.tol = s.get<double>("tol", o.tol);
        o.max_iter = s.get<int>("max_iter", o.max_iter);
        o.seed = s.get<std::uint64_t>("seed", o.seed);
        o.basis_size = s.get<int>("basis_size", o.basis_size);
        o.richardson = s.list<int>("richardson", o.richardson);
        o.box_control = s.get<bool>("box_control", o.box_control);
        o.binding_tol = s.get<double>("binding_tol", o.binding_tol);
        s.check(o.tol > 0.0, "must be positive", "tol");
        s.check(o.max_iter > 0, "must be positive", "max_iter");
        s.check(o.basis_size >= 4, "must be at least 4", "basis_size");
        s.check(o.binding_tol >= 0.0, "must be non-negative", "binding_tol");
        s.finish();
        cfg.resolved["solver"] = s.echo();
    }
    if (root["nelson"]) {
        Section s(root["nelson"], "nelson");
        NelsonSection n;
        n.instance = parse_nelson_instance(s, n.random);
        s.finish();
        if (!n.random) {
            if (!cfg.bernstein) throw ConfigError("nelson needs a bernstein section", s.line());
            n.instance.B = *cfg.bernstein;
            if (cfg.potential) n.instance.V = *cfg.potential;
            guarded(s.line(), [&] { n.instance.validate(); return 0; });
        }
        cfg.nelson = n;
        cfg.resolved["nelson"] = s.echo();
    }
    if (root["lemma1"]) {
        Section s(root["lemma1"], "lemma1");
        Lemma1Section l;
        l.samples = s.get<int>("samples", l.samples);
        l.exp_samples = s.get<int>("exp_samples", l.exp_samples);
        l.max_atoms = s.get<int>("max_atoms", l.max_atoms);
        l.max_rate = s.get<double>("max_rate", l.max_rate);
        l.max_weight = s.get<double>("max_weight", l.max_weight);
        l.radius = s.get<double>("radius", l.radius);
        const auto comparator = s.get<std::string>("comparator", "standard");
        s.check(comparator == "standard" || comparator == "sign_flipped", "expected standard or sign_flipped",
                "comparator");
        l.sign_flipped = comparator == "sign_flipped";
        s.check(l.samples >= 0 && l.exp_samples >= 0, "sample counts must be non-negative");
        s.check(l.max_atoms >= 0 && l.max_rate > 0.0 && l.max_weight > 0.0 && l.radius > 0.0,
                "ranges must be positive");
        s.finish();
        cfg.lemma1 = l;
        cfg.resolved["lemma1"] = s.echo();
    }
    if (root["sweep"]) {
        Section s(root["sweep"], "sweep");
        SweepSection w;
        w.parameter = s.required<std::string>("parameter");
        w.values = s.list<double>("values", {});
        s.check(!w.values.empty(), "needs at least one value", "values");
        s.finish();
        cfg.sweep = w;
        cfg.resolved["sweep"] = s.echo();
    }
    {
        OutputSection& o = cfg.output;
        Section s(root["output"] ? root["output"] : YAML::Node(YAML::NodeType::Map), "output");
        o.dir = s.get<std::string>("dir", o.dir);
        o.stem = s.get<std::string>("stem", o.stem);
        o.format = s.get<std::string>("format", o.format);
        s.check(o.format == "json" || o.format == "csv", "expected json or csv", "format");
        s.finish();
        cfg.resolved["output"] = s.echo();
    }
    return cfg;
}

}  // namespace

report::Json JobConfig::echo(std::initializer_list<const char*> sections) const {
    Json out = Json::object();
    for (const char* name : sections) {
        if (resolved.contains(name)) out[name] = resolved[name];
    }
    return out;
}

JobConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line + 1);
    }
    return parse_root(root, text);
}

JobConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

JobConfig with_override(const JobConfig& cfg, const std::string& path, double value) {
    YAML::Node root = YAML::Load(cfg.source);
    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);
    if (parts.empty()) throw ConfigError("empty sweep parameter");
    std::vector<YAML::Node> chain{root};
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        YAML::Node next = chain.back()[parts[i]];
        if (!next || !next.IsMap()) throw ConfigError("sweep parameter '" + path + "' does not name a section");
        chain.push_back(next);
    }
    chain.back()[parts.back()] = report::format_double(value);
    root.remove("sweep");
    YAML::Emitter out;
    out << root;
    JobConfig job = parse_config(out.c_str());
    job.source = out.c_str();
    return job;
}

}  // namespace bindcert::config

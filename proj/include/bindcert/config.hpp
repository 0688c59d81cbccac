#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bindcert/bernstein.hpp"
#include "bindcert/fock.hpp"
#include "bindcert/grid.hpp"
#include "bindcert/kinetic.hpp"
#include "bindcert/potential.hpp"
#include "bindcert/report.hpp"

namespace bindcert::config {

struct SolverSection {
    double tol = 1e-9;
    int max_iter = 5000;
    std::uint64_t seed = 1;
    int basis_size = 40;
    std::vector<int> richardson{2, 4};
    bool box_control = false;
    double binding_tol = 1e-6;  ///< slack added to e0 before the binding test
};

struct RandomNelson {
    int count = 50;
    int decoupled_every = 5;  ///< every k-th instance has g = 0; 0 disables
    fock::RandomInstanceOptions options;
};

struct NelsonSection {
    fock::NelsonInstance instance;  ///< explicit instance (B and V from their sections)
    std::optional<RandomNelson> random;
};

struct Lemma1Section {
    int samples = 10000;
    int exp_samples = 100000;
    int max_atoms = 8;
    double max_rate = 10.0;
    double max_weight = 10.0;
    double radius = 10.0;
    bool sign_flipped = false;  ///< negative-test harness: compares with the inequality reversed
};

struct SweepSection {
    std::string parameter;  ///< dotted path, e.g. potential.charge
    std::vector<double> values;
};

struct OutputSection {
    std::string dir = ".";
    std::string stem = "report";
    std::string format = "json";
};

/// A parsed job file. Every section keeps the resolved values (defaults
/// included) as JSON for echoing into reports.
struct JobConfig {
    std::optional<KineticProfile> kinetic;
    std::optional<PotentialSpec> potential;
    std::optional<BernsteinFunction> bernstein;
    std::vector<GridSpec> grids;
    SolverSection solver;
    std::optional<NelsonSection> nelson;
    std::optional<Lemma1Section> lemma1;
    std::optional<SweepSection> sweep;
    OutputSection output;

    report::Json resolved = report::Json::object();  ///< section name -> resolved values
    std::string source;                              ///< original text, used for sweep overrides

    /// Resolved values of the named sections that are present, in the given order.
    report::Json echo(std::initializer_list<const char*> sections) const;
};

/// Parses a job document. Unknown keys, wrong types and invalid values raise
/// ConfigError carrying the 1-based line of the offending node.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

/// Re-parses `cfg.source` with the scalar at `path` replaced and the sweep
/// section removed.
JobConfig with_override(const JobConfig& cfg, const std::string& path, double value);

}  // namespace bindcert::config

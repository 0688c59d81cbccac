#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bindcert/config.hpp"
#include "bindcert/report.hpp"

namespace bindcert::cli {

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kUnconverged = 2,
    kCheckFailed = 3,
};

struct RunOptions {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    int jobs = 1;
};

struct CommandResult {
    int exit_code = kOk;
    std::vector<report::CertificateRecord> records;
    std::vector<onebody::SolveResult> convergence;  ///< rows for the CSV table
    std::vector<std::string> notes;
};

/// Applies --seed / --out / --format on top of the parsed job.
void apply_overrides(config::JobConfig& cfg, const RunOptions& options);

CommandResult solve_onebody(const config::JobConfig& cfg);
CommandResult verify_lemma1(const config::JobConfig& cfg);
CommandResult verify_theorem(const config::JobConfig& cfg);
CommandResult sweep(const config::JobConfig& cfg, int jobs);

struct Lemma1Batch {
    double max_margin = 0.0;  ///< under the configured comparator
    RealVector argmax_p;
    RealVector argmax_k;
    double exp_max = 0.0;
    double exp_argmax_t = 0.0;
    double scaling_defect = 0.0;  ///< max |check(t,p,k) - check(1, sqrt(t) p, sqrt(t) k)|
    std::size_t samples = 0;
    std::size_t exp_samples = 0;
};

/// Randomized Lemma 1 and exponential-inequality sweep. Each sample draws d in
/// {1,2,3}, p and k in the ball of the configured radius and, unless `fixed` is
/// given, a Bernstein function with up to max_atoms atoms.
Lemma1Batch lemma1_batch(const config::Lemma1Section& section, std::uint64_t seed,
                         const std::optional<BernsteinFunction>& fixed = std::nullopt);

/// Resolved description of a field instance, as echoed into reports.
report::Json describe(const fock::NelsonInstance& instance);

/// Instances verify_theorem runs for this job (explicit or seeded random batch).
std::vector<fock::NelsonInstance> theorem_instances(const config::JobConfig& cfg);

/// Serialized output in the requested format.
std::string render(const CommandResult& result, const std::string& format);

/// Loads the config, runs `command`, writes <out>/<stem>.<format> and a short
/// summary to `log`. Returns the process exit code.
int run(const std::string& command, const std::string& config_path, const RunOptions& options, std::ostream& log);

}  // namespace bindcert::cli

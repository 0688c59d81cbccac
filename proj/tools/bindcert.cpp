#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "bindcert/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Binding certificates for Bernstein-type kinetic energies"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string format;
    std::uint64_t seed = 0;
    int jobs = 1;

    bindcert::cli::RunOptions options;
    std::string command;
    for (const char* name : {"solve-onebody", "verify-lemma1", "verify-theorem", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config, "Job file")->required()->envname("BINDCERT_CONFIG");
        sub->add_option("--out", out, "Output directory")->envname("BINDCERT_OUT");
        sub->add_option("--seed", seed, "Seed for every randomized part")->envname("BINDCERT_SEED");
        sub->add_option("--jobs", jobs, "Concurrent sweep jobs")->check(CLI::PositiveNumber)->envname("BINDCERT_JOBS");
        sub->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}))
            ->envname("BINDCERT_FORMAT");
        sub->callback([&command, name] { command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : bindcert::cli::kConfigError;
    }

    auto* sub = app.get_subcommand(command);
    if (sub->count("--out")) options.out_dir = out;
    if (sub->count("--seed")) options.seed = seed;
    if (sub->count("--format")) options.format = format;
    options.jobs = jobs;
    return bindcert::cli::run(command, config, options, std::cout);
}

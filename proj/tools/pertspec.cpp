// Command-line front end: `pertspec run <config> [options]`.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pertspec/config.hpp"
#include "pertspec/errors.hpp"
#include "pertspec/report.hpp"

namespace {

struct RunOptions {
    std::string config;
    std::string out = "pertspec_out";
    std::string oracle;  // "", "on" or "off"
    std::size_t grid = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string format = "csv";
};

int run(const RunOptions& opt) {
    using namespace pertspec;
    JobConfig config;
    try {
        config = load_config(opt.config);
        if (opt.oracle == "on") config.oracle.enabled = true;
        if (opt.oracle == "off") config.oracle.enabled = false;
        if (opt.grid != 0) config.oracle.grid = opt.grid;
        if (opt.seed_given) config.seed = opt.seed;
        config.validate();
    } catch (const Error& e) {
        RunResult failed;
        failed.status = RunStatus::error;
        failed.error = e.what();
        std::cerr << "pertspec: " << e.what() << "\n";
        try {
            emit_report(failed, opt.out, ReportFormat::structured);
        } catch (const Error&) {
        }
        return failed.exit_code();
    }

    const RunResult result = run_job(config);
    const ReportFormat format = opt.format == "structured" ? ReportFormat::structured : ReportFormat::csv;
    try {
        emit_report(result, opt.out, format);
    } catch (const Error& e) {
        std::cerr << "pertspec: " << e.what() << "\n";
        return 2;
    }
    std::cout << (format == ReportFormat::csv ? format_csv(result.records) : format_structured(result));
    if (result.status == RunStatus::error) std::cerr << "pertspec: " << result.error << "\n";
    for (const std::string& note : result.notes) std::cerr << "pertspec: " << note << "\n";
    return result.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectra of boundary-perturbed operators, delay systems and quadratic pencils"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* cmd = app.add_subcommand("run", "Scan, certify and report the spectrum described by a config file");
    // Existence is checked by load_config so that an error report is still written.
    cmd->add_option("config", opt.config, "JSON job configuration")->required();
    cmd->add_option("--out", opt.out, "Output directory")->capture_default_str();
    cmd->add_option("--oracle", opt.oracle, "Override the finite-difference oracle")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--grid", opt.grid, "Oracle grid size n (overrides the config)")->check(CLI::Range(64, 2047));
    auto* seed = cmd->add_option("--seed", opt.seed, "Quasi-random seed (overrides the config)");
    cmd->add_option("--format", opt.format, "Primary report format")
        ->check(CLI::IsMember({"csv", "structured"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage errors share the error exit code
    }
    opt.seed_given = seed->count() > 0;
    return run(opt);
}

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "nsstab/config_file.hpp"
#include "nsstab/experiment.hpp"
#include "nsstab/verify.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_config_error = 2;

int effective_threads(int flag_value, int config_value) {
    if (flag_value > 0) return flag_value;
    if (config_value > 0) return config_value;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string run_dir_for(const std::string& out_dir, const std::string& config_path,
                        std::uint64_t hash) {
    char suffix[12];
    std::snprintf(suffix, sizeof suffix, "%08llx",
                  static_cast<unsigned long long>(hash & 0xffffffffULL));
    return out_dir + "/" + fs::path(config_path).stem().string() + "-" + suffix;
}

/// Reruns with the same config hash refuse to overwrite unless forced.
void ensure_writable(const std::string& dir, bool force) {
    if (!force && fs::exists(dir + "/summary.json"))
        throw nsstab::ConfigError("output directory '" + dir +
                                  "' already holds a report for this config (use --force)");
}

int cmd_verify(int threads, bool negate_nu, bool quiet) {
    nsstab::BatteryOptions opts;
    opts.threads = effective_threads(threads, 0);
    opts.negate_nu = negate_nu;
    const auto results = nsstab::run_battery(opts);
    bool all_ok = true;
    for (const auto& r : results) {
        all_ok = all_ok && r.passed;
        if (!quiet || !r.passed)
            std::printf("%-32s %s  [%7.2fs]  %s\n", r.name.c_str(),
                        r.passed ? "PASS" : "FAIL", r.seconds, r.detail.c_str());
    }
    std::printf("%zu checks, %s\n", results.size(), all_ok ? "all passed" : "FAILURES present");
    return all_ok ? exit_ok : exit_check_failed;
}

int cmd_run(const std::string& config_path, const std::string& out_flag, int threads_flag,
            bool force, bool quiet_flag) {
    const nsstab::CliConfig cfg = nsstab::parse_config_file(config_path);
    const std::string out_dir = out_flag.empty() ? cfg.out_dir : out_flag;
    const bool quiet = quiet_flag || cfg.quiet;
    (void)effective_threads(threads_flag, cfg.threads);  // single run is serial

    const std::string dir = run_dir_for(out_dir, config_path, cfg.experiment.hash());
    ensure_writable(dir, force);

    const nsstab::ExperimentReport report = nsstab::run_experiment(cfg.experiment);
    nsstab::write_report_files(report, dir);
    if (!quiet) {
        std::printf("report: %s\n", dir.c_str());
        std::printf("verdict: %s  J=%.6g J0=%.6g  A0=%.6g  gronwall_C=%.6g (bound %.6g)%s\n",
                    report.verdict.stable ? "stable" : "not-stable", report.quantities.J,
                    report.quantities.J0, report.verdict.measured_A0, report.verdict.gronwall_C,
                    report.verdict.gronwall_bound, report.aborted ? "  [ABORTED]" : "");
    }
    return report.aborted ? exit_check_failed : exit_ok;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag, int threads_flag,
              bool force, bool quiet_flag) {
    const nsstab::CliConfig cfg = nsstab::parse_config_file(config_path);
    if (cfg.experiment.sweep.empty())
        throw nsstab::ConfigError(config_path + ": sweep requires experiment.sweep values");
    const std::string out_dir = out_flag.empty() ? cfg.out_dir : out_flag;
    const bool quiet = quiet_flag || cfg.quiet;
    const int threads = effective_threads(threads_flag, cfg.threads);

    const std::string dir = run_dir_for(out_dir, config_path, cfg.experiment.hash());
    ensure_writable(dir, force);
    fs::create_directories(dir);

    const nsstab::SweepResult sweep = nsstab::threshold_sweep(cfg.experiment, threads);
    for (std::size_t i = 0; i < sweep.reports.size(); ++i) {
        char member[32];
        std::snprintf(member, sizeof member, "/member_%03zu", i);
        nsstab::write_report_files(sweep.reports[i], dir + member);
    }
    {
        std::ofstream os(dir + "/sweep_summary.json");
        os << nsstab::sweep_summary_json(cfg.experiment, sweep);
    }
    if (!quiet) {
        std::printf("sweep report: %s\n", dir.c_str());
        for (const auto& m : sweep.members)
            std::printf("  epsilon=%-12.6g %s%s\n", m.epsilon,
                        m.stable ? "stable" : "not-stable", m.aborted ? " [aborted]" : "");
        std::printf("bracket: largest stable = %s, smallest unstable = %s\n",
                    sweep.largest_stable ? std::to_string(*sweep.largest_stable).c_str() : "none",
                    sweep.smallest_unstable ? std::to_string(*sweep.smallest_unstable).c_str()
                                            : "none");
        if (!sweep.monotonicity_violations.empty()) {
            std::printf("monotonicity violations at:");
            for (double e : sweep.monotonicity_violations) std::printf(" %g", e);
            std::printf("\n");
        }
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral Navier-Stokes stability experiments on a periodic box"};
    app.require_subcommand(1);

    std::string out_dir, config_path;
    int threads = 0;
    bool force = false, quiet = false, negate_nu = false;
    app.add_option("--out", out_dir, "Output directory (overrides config)");
    app.add_option("--threads", threads, "Worker thread count (overrides config)");
    app.add_flag("--force", force, "Allow overwriting an existing report directory");
    app.add_flag("--quiet", quiet, "Suppress progress output");

    auto* verify = app.add_subcommand("verify", "Run the built-in verification battery");
    verify->add_flag("--inject-nu-sign-flip", negate_nu)->group("");  // test hook, hidden

    auto* runcmd = app.add_subcommand("run", "Run one experiment from a config file");
    runcmd->add_option("config", config_path, "Experiment config file")->required();

    auto* sweepcmd = app.add_subcommand("sweep", "Run a threshold sweep from a config file");
    sweepcmd->add_option("config", config_path, "Experiment config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(verify)) return cmd_verify(threads, negate_nu, quiet);
        if (app.got_subcommand(runcmd)) return cmd_run(config_path, out_dir, threads, force, quiet);
        return cmd_sweep(config_path, out_dir, threads, force, quiet);
    } catch (const nsstab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_check_failed;
    }
}

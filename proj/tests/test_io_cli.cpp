#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nsstab/config_file.hpp"
#include "nsstab/diagnostics.hpp"
#include "nsstab/experiment.hpp"

using namespace nsstab;

namespace {

const char* full_config = R"(# case-ii experiment
[box]
lengths = 6.283185307179586 6.283185307179586 6.283185307179586
resolution = 16 16 16

[solver]
nu = 1.0
dt = auto
cfl = 0.4
t_end = 1.0          # inline comment
record_every = 4
dealias = true

[base]
kind = taylor_green_2d
amplitude = 1.0

[perturbation]
case = ii
seed = 7
epsilon = 1e-3
bulk_amplitude = 0.5

[experiment]
horizon = 1.0
sweep = 1e-4 1e-3 1e-2

[output]
threads = 2
dir = scratch
quiet = false
)";

}  // namespace

TEST_CASE("full config parses with sections, comments, and defaults") {
    const CliConfig cfg = parse_config_text(full_config, "test.ini");
    CHECK(cfg.experiment.box.nx() == 16);
    CHECK(cfg.experiment.solver.nu == 1.0);
    CHECK(cfg.experiment.solver.dt_auto);
    CHECK(cfg.experiment.solver.record_every == 4);
    CHECK(cfg.experiment.base.kind == BaseFlowSpec::Kind::taylor_green_2d);
    CHECK(cfg.experiment.perturbation.kase == PerturbationSpec::Case::ii);
    CHECK(cfg.experiment.perturbation.epsilon == 1e-3);
    CHECK(cfg.experiment.sweep == std::vector<double>{1e-4, 1e-3, 1e-2});
    CHECK(cfg.threads == 2);
    CHECK(cfg.out_dir == "scratch");
}

TEST_CASE("unknown keys and sections are rejected by name") {
    try {
        parse_config_text("[solver]\nnu = 1\nt_end = 1\nviscosity = 2\n", "bad.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("viscosity") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text("[engine]\nnu = 1\n", "bad.ini"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("nu = 1\n", "bad.ini"), ConfigError);  // no section
}

TEST_CASE("invalid values name the key and constraint") {
    const std::string base = "[solver]\nnu = 1.0\nt_end = 1.0\n[experiment]\nhorizon = 1.0\n";
    try {
        parse_config_text(base + "[solver]\ndt = -1\n", "bad.ini");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("dt") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config_text(base + "[solver]\nnu = not_a_number\n", "bad.ini"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(base + "[perturbation]\ncase = iii\n", "bad.ini"),
                    ConfigError);
    // horizon beyond t_end violates the experiment invariant
    CHECK_THROWS_AS(
        parse_config_text("[solver]\nnu = 1\nt_end = 1\n[experiment]\nhorizon = 2\n", "bad.ini"),
        ConfigError);
    // missing required keys
    CHECK_THROWS_AS(parse_config_text("[solver]\nnu = 1\n", "bad.ini"), ConfigError);
}

TEST_CASE("config echo text is deterministic and hash-stable") {
    const CliConfig a = parse_config_text(full_config, "a.ini");
    const CliConfig b = parse_config_text(full_config, "b.ini");
    CHECK(a.experiment.canonical_text() == b.experiment.canonical_text());
    CHECK(a.experiment.hash() == b.experiment.hash());
}

TEST_CASE("CSV export carries a header and 17-significant-digit values") {
    namespace fs = std::filesystem;
    DiagnosticSeries s;
    const double v0 = 0.1234567890123456789, v1 = 1.0 / 3.0;
    s.append(0.0, {{"alpha", v0}, {"beta", 1.0}});
    s.append(0.25, {{"alpha", v1}, {"beta", 2.0}});
    const fs::path dir = fs::temp_directory_path() / "nsstab_csv_test";
    fs::create_directories(dir);
    const std::string path = (dir / "series.csv").string();
    write_csv(s, path);

    std::ifstream is(path);
    std::string header, row0, row1;
    std::getline(is, header);
    std::getline(is, row0);
    std::getline(is, row1);
    CHECK(header == "time,alpha,beta");
    // %.17g output round-trips the doubles exactly
    const auto second_field = [](const std::string& row) {
        const auto a = row.find(',');
        const auto b = row.find(',', a + 1);
        return row.substr(a + 1, b - a - 1);
    };
    CHECK(std::strtod(second_field(row0).c_str(), nullptr) == v0);
    CHECK(std::strtod(second_field(row1).c_str(), nullptr) == v1);
    fs::remove_all(dir);
}

TEST_CASE("report files land in the output directory") {
    namespace fs = std::filesystem;
    ExperimentConfig c;
    c.box = BoxSpec::cube(2.0 * pi, 16);
    c.solver.nu = 1.0;
    c.solver.t_end = 0.5;
    c.solver.record_every = 2;
    c.base.kind = BaseFlowSpec::Kind::taylor_green_2d;
    c.base.amplitude = 1.0;
    c.perturbation.kase = PerturbationSpec::Case::ii;
    c.perturbation.epsilon = 1e-3;
    c.perturbation.bulk_amplitude = 0.2;
    c.horizon = 0.5;
    c.snapshot_times = {0.0, 0.5};
    const ExperimentReport rep = run_experiment(c);
    const fs::path dir = fs::temp_directory_path() / "nsstab_report_test";
    fs::remove_all(dir);
    write_report_files(rep, dir.string());
    for (const char* name : {"summary.json", "v_series.csv", "w_series.csv", "u_series.csv",
                             "budgets.csv"})
        CHECK(fs::exists(dir / name));
    // two snapshot times, two trajectories each
    int snapshots = 0;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().filename().string().rfind("snapshot_", 0) == 0) ++snapshots;
    CHECK(snapshots == 4);
    fs::remove_all(dir);
}

#include "nsstab/config_file.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace nsstab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

double to_double(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return d;
    } catch (const std::exception&) {
        fail(where, "expected a number, got '" + v + "'");
    }
}

long to_long(const std::string& where, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long n = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return n;
    } catch (const std::exception&) {
        fail(where, "expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& where, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(where, "expected true/false, got '" + v + "'");
}

}  // namespace

CliConfig parse_config_text(const std::string& text, const std::string& origin) {
    CliConfig cfg;
    ExperimentConfig& e = cfg.experiment;

    // recognized keys per section; anything else is a typo we refuse
    const std::map<std::string, std::set<std::string>> known = {
        {"box", {"lengths", "resolution"}},
        {"solver", {"nu", "dt", "cfl", "t_end", "record_every", "dealias"}},
        {"base", {"kind", "amplitude", "seed", "spectrum_slope", "forcing_amplitude"}},
        {"perturbation", {"case", "seed", "epsilon", "bulk_amplitude"}},
        {"experiment", {"horizon", "sweep", "snapshot_times"}},
        {"output", {"threads", "dir", "quiet"}},
    };

    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    bool saw_nu = false, saw_t_end = false, saw_horizon = false;

    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);

        if (line.front() == '[') {
            if (line.back() != ']') fail(where, "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (known.find(section) == known.end())
                fail(where, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(where, "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) fail(where, "key '" + key + "' outside any [section]");
        if (known.at(section).find(key) == known.at(section).end())
            fail(where, "unknown key '" + key + "' in section [" + section + "]");
        const std::string keyref = section + "." + key + " (" + where + ")";

        if (section == "box") {
            const auto parts = split_ws(value);
            if (parts.size() != 3) fail(keyref, "expected three values");
            if (key == "lengths")
                for (int a = 0; a < 3; ++a)
                    e.box.lengths[static_cast<std::size_t>(a)] = to_double(keyref, parts[static_cast<std::size_t>(a)]);
            else
                for (int a = 0; a < 3; ++a)
                    e.box.resolution[static_cast<std::size_t>(a)] =
                        static_cast<int>(to_long(keyref, parts[static_cast<std::size_t>(a)]));
        } else if (section == "solver") {
            if (key == "nu") {
                e.solver.nu = to_double(keyref, value);
                saw_nu = true;
            } else if (key == "dt") {
                if (value == "auto") {
                    e.solver.dt_auto = true;
                } else {
                    e.solver.dt_auto = false;
                    e.solver.dt = to_double(keyref, value);
                }
            } else if (key == "cfl") {
                e.solver.cfl = to_double(keyref, value);
            } else if (key == "t_end") {
                e.solver.t_end = to_double(keyref, value);
                saw_t_end = true;
            } else if (key == "record_every") {
                e.solver.record_every = static_cast<int>(to_long(keyref, value));
            } else {
                e.solver.dealias = to_bool(keyref, value);
            }
        } else if (section == "base") {
            if (key == "kind") {
                if (value == "taylor_green_2d")
                    e.base.kind = BaseFlowSpec::Kind::taylor_green_2d;
                else if (value == "random_2d")
                    e.base.kind = BaseFlowSpec::Kind::random_2d;
                else if (value == "forced_2d")
                    e.base.kind = BaseFlowSpec::Kind::forced_2d;
                else
                    fail(keyref, "expected taylor_green_2d | random_2d | forced_2d");
            } else if (key == "amplitude") {
                e.base.amplitude = to_double(keyref, value);
            } else if (key == "seed") {
                e.base.seed = static_cast<std::uint64_t>(to_long(keyref, value));
            } else if (key == "spectrum_slope") {
                e.base.spectrum_slope = to_double(keyref, value);
            } else {
                e.base.forcing_amplitude = to_double(keyref, value);
            }
        } else if (section == "perturbation") {
            if (key == "case") {
                if (value == "i")
                    e.perturbation.kase = PerturbationSpec::Case::i;
                else if (value == "ii")
                    e.perturbation.kase = PerturbationSpec::Case::ii;
                else
                    fail(keyref, "expected i | ii");
            } else if (key == "seed") {
                e.perturbation.seed = static_cast<std::uint64_t>(to_long(keyref, value));
            } else if (key == "epsilon") {
                e.perturbation.epsilon = to_double(keyref, value);
            } else {
                e.perturbation.bulk_amplitude = to_double(keyref, value);
            }
        } else if (section == "experiment") {
            if (key == "horizon") {
                e.horizon = to_double(keyref, value);
                saw_horizon = true;
            } else if (key == "sweep") {
                e.sweep.clear();
                for (const auto& tok : split_ws(value)) e.sweep.push_back(to_double(keyref, tok));
            } else {
                e.snapshot_times.clear();
                for (const auto& tok : split_ws(value))
                    e.snapshot_times.push_back(to_double(keyref, tok));
            }
        } else {  // output
            if (key == "threads")
                cfg.threads = static_cast<int>(to_long(keyref, value));
            else if (key == "dir")
                cfg.out_dir = value;
            else
                cfg.quiet = to_bool(keyref, value);
        }
    }

    if (!saw_nu) fail(origin, "missing required key solver.nu");
    if (!saw_t_end) fail(origin, "missing required key solver.t_end");
    if (!saw_horizon) fail(origin, "missing required key experiment.horizon");
    if (cfg.threads < 0) fail(origin, "output.threads: must be >= 0");

    try {
        e.validate();
    } catch (const std::exception& ex) {
        throw ConfigError(origin + ": " + ex.what());
    }
    return cfg;
}

CliConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace nsstab

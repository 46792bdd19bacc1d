// run_config.hpp
// Command-line and config-file parsing for the phasekey tool.
//
// Config files are flat `key = value` text with keys equal to the long flag
// names (without the dashes). Lines starting with '#' are comments.
// Command-line flags win over file values.

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasekey/montecarlo.hpp"
#include "phasekey/protocol.hpp"

namespace phasekey::cli {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Subcommand { bound, sweep, maxdist, simulate, verify };

struct RunConfig {
    Subcommand subcommand = Subcommand::sweep;
    double mu = 75.0;
    double delta = std::numbers::pi / 100.0;
    double p_dark = kDefaultDarkCount;
    double l = 40.0;
    double l_min = 0.0;
    double l_max = 120.0;
    double l_step = 1.0;
    double precision = 0.25;  // maxdist bisection width (km)
    montecarlo::AttackModel attack;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    std::string out;  // empty: standard output
    std::string suite = "all";
    bool tamper_lambda_1x = false;

    bool show_help = false;
    std::string help_text;

    void validate() const {
        const auto check = [](bool ok, const char* msg) {
            if (!ok) throw ConfigError(msg);
        };
        check(std::isfinite(mu) && mu >= 0.0, "mu must be a finite number >= 0");
        check(delta > 0.0 && delta < std::numbers::pi / 2, "delta must lie in (0, pi/2)");
        check(p_dark >= 0.0 && p_dark < 1.0, "p-dark must lie in [0, 1)");
        check(std::isfinite(l) && l >= 0.0, "l must be >= 0");
        check(std::isfinite(l_min) && std::isfinite(l_max) && l_min >= 0.0 && l_min <= l_max,
              "need 0 <= l-min <= l-max");
        check(l_step > 0.0 && std::isfinite(l_step), "l-step must be positive");
        check(precision > 0.0 && std::isfinite(precision), "precision must be positive");
        check(attack.tap_fraction >= 0.0 && attack.tap_fraction <= 1.0, "tap must lie in [0, 1]");
        check(attack.usd_success >= 0.0 && attack.usd_success <= 1.0, "usd-success must lie in [0, 1]");
        check(trials >= 1, "trials must be >= 1");
        check(suite == "fock" || suite == "security" || suite == "montecarlo" || suite == "all",
              "suite must be one of fock, security, montecarlo, all");
    }
};

inline const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {"mu",     "delta", "Delta",       "p-dark", "l",
                                                  "l-min",  "l-max", "l-step",      "precision",
                                                  "attack", "tap",   "usd-success", "trials", "seed",
                                                  "out",    "suite"};
    return keys;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + text + "'");
    }
    if (pos != t.size() || !std::isfinite(v)) throw ConfigError(key + ": not a number: '" + text + "'");
    return v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& text) {
    const double v = parse_number(key, text);
    if (v < 0.0 || v != std::floor(v) || v > 1.8e19) throw ConfigError(key + ": expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
}

/// Decimal radians, "pi", or "pi/<n>".
inline double parse_angle(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "pi") return std::numbers::pi;
    if (t.rfind("pi/", 0) == 0) {
        const double n = parse_number(key, t.substr(3));
        if (!(n > 0.0)) throw ConfigError(key + ": divisor must be positive");
        return std::numbers::pi / n;
    }
    return parse_number(key, t);
}

/// Reads `key = value` lines. Unknown keys are rejected.
inline std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    const auto& keys = config_keys();
    std::map<std::string, std::string> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        values[key] = trim(t.substr(eq + 1));
    }
    return values;
}

inline montecarlo::AttackKind parse_attack(const std::string& s) {
    if (s == "honest") return montecarlo::AttackKind::honest;
    if (s == "beam_split" || s == "beam-split") return montecarlo::AttackKind::beam_split;
    if (s == "usd_vacuum" || s == "usd-vacuum") return montecarlo::AttackKind::usd_vacuum;
    throw ConfigError("attack must be honest, beam_split or usd_vacuum");
}

/// Applies merged key/value settings on top of the defaults.
inline void apply_values(RunConfig& cfg, const std::map<std::string, std::string>& v) {
    const auto has = [&](const char* k) { return v.count(k) > 0; };
    if (has("delta") && has("Delta")) throw ConfigError("give either delta or Delta, not both");
    if (has("delta")) cfg.delta = parse_angle("delta", v.at("delta"));
    if (has("Delta")) cfg.delta = 0.5 * parse_angle("Delta", v.at("Delta"));
    if (has("mu")) cfg.mu = parse_number("mu", v.at("mu"));
    if (has("p-dark")) cfg.p_dark = parse_number("p-dark", v.at("p-dark"));
    if (has("l")) cfg.l = parse_number("l", v.at("l"));
    if (has("l-min")) cfg.l_min = parse_number("l-min", v.at("l-min"));
    if (has("l-max")) cfg.l_max = parse_number("l-max", v.at("l-max"));
    if (has("l-step")) cfg.l_step = parse_number("l-step", v.at("l-step"));
    if (has("precision")) cfg.precision = parse_number("precision", v.at("precision"));
    if (has("attack")) cfg.attack.kind = parse_attack(v.at("attack"));
    if (has("tap")) cfg.attack.tap_fraction = parse_number("tap", v.at("tap"));
    if (has("usd-success")) cfg.attack.usd_success = parse_number("usd-success", v.at("usd-success"));
    if (has("trials")) cfg.trials = parse_count("trials", v.at("trials"));
    if (has("seed")) cfg.seed = parse_count("seed", v.at("seed"));
    if (has("out")) cfg.out = v.at("out");
    if (has("suite")) cfg.suite = v.at("suite");
}

/// args excludes the program name.
inline RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"Key-rate, security-bound and Monte Carlo tool for two-pulse B92 with a monitoring detector",
                 "phasekey"};
    app.require_subcommand(1);

    const std::vector<std::pair<Subcommand, std::string>> names = {{Subcommand::bound, "bound"},
                                                                   {Subcommand::sweep, "sweep"},
                                                                   {Subcommand::maxdist, "maxdist"},
                                                                   {Subcommand::simulate, "simulate"},
                                                                   {Subcommand::verify, "verify"}};
    const std::map<std::string, std::string> descriptions = {
        {"bound", "phase-error bound and key rate at one (mu, l)"},
        {"sweep", "optimized key rate over a distance range, as CSV"},
        {"maxdist", "largest distance with a positive key rate"},
        {"simulate", "pulse-by-pulse Monte Carlo run"},
        {"verify", "run the built-in oracle cross-checks"}};

    const std::map<std::string, std::string> flag_help = {
        {"mu", "mean photon number per pulse"},
        {"delta", "phase half-angle: radians, pi or pi/<n>"},
        {"Delta", "modulator precision, 2 delta"},
        {"p-dark", "dark-count probability per pulse pair"},
        {"l", "fibre length (km)"},
        {"l-min", "first distance of a sweep (km)"},
        {"l-max", "last distance of a sweep (km)"},
        {"l-step", "sweep step (km)"},
        {"precision", "maxdist resolution (km)"},
        {"attack", "honest, beam_split or usd_vacuum"},
        {"tap", "beam_split: diverted fraction"},
        {"usd-success", "usd_vacuum: discrimination success probability"},
        {"trials", "Monte Carlo pulse pairs"},
        {"seed", "Monte Carlo seed"},
        {"out", "CSV output path (default stdout)"},
        {"suite", "fock, security, montecarlo or all"}};
    std::map<std::string, std::string> flag_text;
    std::map<std::string, CLI::Option*> flag_opts;
    std::map<std::string, CLI::App*> subs;
    std::string config_path;
    bool tamper = false;
    for (const auto& [kind, name] : names) {
        CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
        subs[name] = sub;
        sub->add_option("--config", config_path, "key = value file; flags override it");
        for (const auto& key : config_keys()) {
            auto* o = sub->add_option("--" + key, flag_text[key], flag_help.at(key));
            flag_opts[name + "/" + key] = o;
        }
        if (name == "verify") {
            sub->add_flag("--tamper-lambda-1x", tamper)->group("");
        }
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        RunConfig cfg;
        cfg.show_help = true;
        cfg.help_text = app.help();
        return cfg;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    RunConfig cfg;
    std::string chosen;
    for (const auto& [kind, name] : names) {
        if (subs[name]->parsed()) {
            cfg.subcommand = kind;
            chosen = name;
        }
    }

    std::map<std::string, std::string> values;
    if (!config_path.empty()) values = read_config_file(config_path);
    for (const auto& key : config_keys()) {
        if (flag_opts[chosen + "/" + key]->count() > 0) {
            // A flag replaces the file's setting, including the other angle spelling.
            if (key == "delta") values.erase("Delta");
            if (key == "Delta") values.erase("delta");
            values[key] = flag_text[key];
        }
    }
    if (flag_opts[chosen + "/delta"]->count() > 0 && flag_opts[chosen + "/Delta"]->count() > 0) {
        throw ConfigError("give either --delta or --Delta, not both");
    }
    apply_values(cfg, values);
    cfg.tamper_lambda_1x = tamper;
    cfg.validate();
    return cfg;
}

inline RunConfig parse_config(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return parse_config(args);
}

}  // namespace phasekey::cli

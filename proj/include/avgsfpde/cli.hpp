#pragma once

// Command-line front end: config resolution, dispatch and report files.
//
// Every setting has one key "section.key". Values are layered as preset
// defaults < config file < environment < flags, and the resolved set is
// echoed to manifest.ini, which `replay` accepts as the only input.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "avgsfpde/errors.hpp"
#include "avgsfpde/experiments.hpp"
#include "avgsfpde/presets.hpp"
#include "avgsfpde/report_io.hpp"

namespace avgsfpde::cli {

enum ExitCode : int { exit_pass = 0, exit_error = 1, exit_fail = 2 };

/// Malformed or inapplicable configuration.
struct ConfigError : Error {
    using Error::Error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& raw) {
    const auto s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
        throw ConfigError(fmt::format("{}: '{}' is not a number", key, raw));
    return v;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    const auto s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(fmt::format("{}: '{}' is not a nonnegative integer", key, raw));
    return v;
}

inline bool parse_bool(const std::string& key, const std::string& raw) {
    const auto s = trim(raw);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, raw));
}

inline std::vector<double> parse_list(const std::string& key, const std::string& raw) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= raw.size()) {
        const auto comma = raw.find(',', start);
        const auto item = raw.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        out.push_back(parse_double(key, item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

inline std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += fmt::format("{}{}", i ? "," : "", xs[i]);
    return out;
}

}  // namespace detail

/// Keys each command reads; anything else in a config file is an error.
inline const std::map<std::string, std::set<std::string>>& command_keys() {
    static const std::set<std::string> stepping{"run.command", "run.preset",      "run.modes",      "run.format",
                                                "run.seed",    "run.threads",     "stepper.dt",     "stepper.T",
                                                "stepper.scheme", "stepper.noise_modes"};
    auto with = [](std::set<std::string> base, std::initializer_list<const char*> extra) {
        for (const char* k : extra) base.insert(k);
        return base;
    };
    static const std::map<std::string, std::set<std::string>> keys{
        {"simulate", with(stepping, {"run.path", "stepper.eps", "stepper.deterministic"})},
        {"sweep-averaging", with(stepping, {"sweep.eps_grid", "sweep.d_rule", "sweep.paths"})},
        {"sweep-khasminskii", with(stepping, {"stepper.eps", "sweep.d_grid", "sweep.paths"})},
        {"sweep-continuity", with(stepping, {"stepper.eps", "sweep.delta_grid", "sweep.paths"})},
        {"audit",
         {"run.command", "run.preset", "run.modes", "run.seed", "audit.holder_trials", "audit.h5_trials",
          "audit.growth_trials", "audit.coercivity_trials", "audit.monotone_trials"}},
    };
    return keys;
}

/// Raw key/value strings, in the order they should be echoed.
using RawConfig = std::map<std::string, std::string>;

inline RawConfig read_config(const std::filesystem::path& path) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path.string(), tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(fmt::format("config {}: {}", path.string(), e.what()));
    }
    RawConfig out;
    for (const auto& [section, body] : tree) {
        if (body.empty())
            throw ConfigError(fmt::format("config {}: key '{}' must sit inside a section", path.string(), section));
        for (const auto& [key, value] : body) out[section + "." + key] = value.get_value<std::string>();
    }
    return out;
}

struct RunConfig {
    std::string command;
    std::string preset;
    std::optional<std::size_t> modes;
    std::string format = "csv+svg";
    std::uint64_t seed = 1;
    std::string threads = "auto";
    std::uint64_t path = 0;
    StepperConfig stepper;
    std::vector<double> eps_grid;
    /// Empty: d = sqrt(eps) snapped to the time grid.
    std::vector<double> d_rule;
    std::vector<double> d_grid;
    std::vector<double> delta_grid;
    std::size_t paths = 0;
    AuditOptions audit;
    std::filesystem::path output_dir = "out";

    unsigned thread_count() const {
        return threads == "auto" ? default_threads() : static_cast<unsigned>(detail::parse_uint("run.threads", threads));
    }
};

inline std::string format_eps(const std::optional<double>& eps) { return eps ? fmt::format("{}", *eps) : "none"; }

/// Applies layered raw values on top of the preset defaults.
inline RunConfig resolve(const std::string& command, const RawConfig& raw) {
    const auto& allowed = command_keys().at(command);
    for (const auto& [key, value] : raw)
        if (!allowed.count(key)) {
            bool known = false;
            for (const auto& [cmd, keys] : command_keys()) known = known || keys.count(key);
            throw ConfigError(known ? fmt::format("config key '{}' is not used by {}", key, command)
                                    : fmt::format("unknown config key '{}'", key));
        }
    auto get = [&](const char* key) -> const std::string* {
        const auto it = raw.find(key);
        return it == raw.end() ? nullptr : &it->second;
    };
    RunConfig rc;
    rc.command = command;
    if (auto v = get("run.command"); v && detail::trim(*v) != command)
        throw ConfigError(fmt::format("run.command: config is for '{}', not {}", detail::trim(*v), command));
    const auto* preset_name = get("run.preset");
    if (!preset_name) throw ConfigError("run.preset: no preset given (use --preset)");
    rc.preset = detail::trim(*preset_name);
    if (auto v = get("run.modes")) rc.modes = detail::parse_uint("run.modes", *v);
    const Preset preset = make_preset(rc.preset, PresetOptions{rc.modes});
    if (has_variable_dimension(rc.preset)) rc.modes = preset.space().dim();

    rc.stepper = preset.stepper;
    rc.eps_grid = preset.eps_grid;
    rc.d_grid = preset.d_grid;
    rc.delta_grid = preset.delta_grid;
    rc.paths = preset.paths;
    if (command == "simulate") rc.paths = 1;

    if (auto v = get("run.format")) {
        rc.format = detail::trim(*v);
        if (rc.format != "csv" && rc.format != "csv+svg")
            throw ConfigError(fmt::format("run.format: '{}' is not csv or csv+svg", rc.format));
    }
    if (auto v = get("run.seed")) rc.seed = detail::parse_uint("run.seed", *v);
    if (auto v = get("run.threads")) {
        rc.threads = detail::trim(*v);
        if (rc.threads != "auto" && detail::parse_uint("run.threads", rc.threads) == 0)
            throw ConfigError("run.threads: must be positive or 'auto'");
    }
    if (auto v = get("run.path")) rc.path = detail::parse_uint("run.path", *v);
    if (auto v = get("stepper.dt")) rc.stepper.dt = detail::parse_double("stepper.dt", *v);
    if (auto v = get("stepper.T")) rc.stepper.T = detail::parse_double("stepper.T", *v);
    if (auto v = get("stepper.scheme")) {
        try {
            rc.stepper.scheme = parse_scheme(detail::trim(*v));
        } catch (const ArgumentError& e) {
            throw ConfigError(fmt::format("stepper.scheme: {}", e.what()));
        }
    }
    if (auto v = get("stepper.noise_modes")) rc.stepper.noise_modes = detail::parse_uint("stepper.noise_modes", *v);
    if (auto v = get("stepper.eps")) {
        const auto s = detail::trim(*v);
        if (s == "none") rc.stepper.eps.reset();
        else rc.stepper.eps = detail::parse_double("stepper.eps", s);
    }
    if (auto v = get("stepper.deterministic")) rc.stepper.deterministic = detail::parse_bool("stepper.deterministic", *v);
    if (auto v = get("sweep.eps_grid")) rc.eps_grid = detail::parse_list("sweep.eps_grid", *v);
    if (auto v = get("sweep.d_rule")) {
        if (detail::trim(*v) == "sqrt_eps") rc.d_rule.clear();
        else rc.d_rule = detail::parse_list("sweep.d_rule", *v);
    }
    if (auto v = get("sweep.d_grid")) rc.d_grid = detail::parse_list("sweep.d_grid", *v);
    if (auto v = get("sweep.delta_grid")) rc.delta_grid = detail::parse_list("sweep.delta_grid", *v);
    if (auto v = get("sweep.paths")) rc.paths = detail::parse_uint("sweep.paths", *v);
    if (auto v = get("audit.holder_trials")) rc.audit.holder_trials = detail::parse_uint("audit.holder_trials", *v);
    if (auto v = get("audit.h5_trials")) rc.audit.h5_trials = detail::parse_uint("audit.h5_trials", *v);
    if (auto v = get("audit.growth_trials")) rc.audit.growth_trials = detail::parse_uint("audit.growth_trials", *v);
    if (auto v = get("audit.coercivity_trials"))
        rc.audit.coercivity_trials = detail::parse_uint("audit.coercivity_trials", *v);
    if (auto v = get("audit.monotone_trials"))
        rc.audit.monotone_trials = detail::parse_uint("audit.monotone_trials", *v);
    rc.stepper.seed = rc.seed;
    rc.audit.seed = rc.seed;
    return rc;
}

/// The resolved configuration as INI text; feeding it back through
/// `resolve` yields the same RunConfig.
inline std::string manifest_text(const RunConfig& rc) {
    const auto& keys = command_keys().at(rc.command);
    auto has = [&](const char* k) { return keys.count(k) > 0; };
    std::string out = fmt::format("; avg_sfpde {} manifest\n[run]\ncommand = {}\npreset = {}\n", io::version,
                                  rc.command, rc.preset);
    if (rc.modes) out += fmt::format("modes = {}\n", *rc.modes);
    if (has("run.format")) out += fmt::format("format = {}\n", rc.format);
    out += fmt::format("seed = {}\n", rc.seed);
    if (has("run.threads")) out += fmt::format("threads = {}\n", rc.threads);
    if (has("run.path")) out += fmt::format("path = {}\n", rc.path);
    if (has("stepper.dt")) {
        out += fmt::format("\n[stepper]\ndt = {}\nT = {}\nscheme = {}\nnoise_modes = {}\n", rc.stepper.dt, rc.stepper.T,
                           to_string(rc.stepper.scheme), rc.stepper.noise_modes);
        if (has("stepper.eps")) out += fmt::format("eps = {}\n", format_eps(rc.stepper.eps));
        if (has("stepper.deterministic"))
            out += fmt::format("deterministic = {}\n", rc.stepper.deterministic ? "true" : "false");
    }
    if (has("sweep.paths")) {
        out += "\n[sweep]\n";
        if (has("sweep.eps_grid")) out += fmt::format("eps_grid = {}\n", detail::join(rc.eps_grid));
        if (has("sweep.d_rule"))
            out += fmt::format("d_rule = {}\n", rc.d_rule.empty() ? "sqrt_eps" : detail::join(rc.d_rule));
        if (has("sweep.d_grid")) out += fmt::format("d_grid = {}\n", detail::join(rc.d_grid));
        if (has("sweep.delta_grid")) out += fmt::format("delta_grid = {}\n", detail::join(rc.delta_grid));
        out += fmt::format("paths = {}\n", rc.paths);
    }
    if (has("audit.holder_trials"))
        out += fmt::format(
            "\n[audit]\nholder_trials = {}\nh5_trials = {}\ngrowth_trials = {}\ncoercivity_trials = {}\n"
            "monotone_trials = {}\n",
            rc.audit.holder_trials, rc.audit.h5_trials, rc.audit.growth_trials, rc.audit.coercivity_trials,
            rc.audit.monotone_trials);
    return out;
}

namespace detail {

namespace fs = std::filesystem;

inline void write_report(const RunConfig& rc, const ExperimentReport& rep, const std::string& stem) {
    io::write_file(rc.output_dir / (stem + ".csv"), io::report_csv(rep));
    if (rc.format == "csv+svg") io::write_file(rc.output_dir / (stem + ".svg"), io::report_svg(rep));
}

inline int verdict_code(bool pass) { return pass ? exit_pass : exit_fail; }

inline int execute(const RunConfig& rc, std::ostream& out) {
    const Preset preset = make_preset(rc.preset, PresetOptions{rc.modes});
    fs::create_directories(rc.output_dir);
    io::write_file(rc.output_dir / "manifest.ini", manifest_text(rc));
    const unsigned threads = rc.thread_count();
    try {
        if (rc.command == "simulate") {
            const auto tr = run_path(preset.op, preset.cs, preset.initial, rc.stepper, rc.path);
            io::write_file(rc.output_dir / "trajectory.csv", io::trajectory_csv(tr));
            const auto end = tr.state(tr.size() - 1);
            const std::string summary = fmt::format(
                "kind: simulate\npreset: {}\nversion: {}\nsteps: {}\nfinal |u|: {}\nsup |u|^2: {}\n", preset.name,
                io::version, tr.size() - 1, io::num(SpectralSpace::norm(end)), io::num(sup_squared_norm(tr)));
            io::write_file(rc.output_dir / "summary.txt", summary);
            out << summary;
            return exit_pass;
        }
        if (rc.command == "sweep-averaging") {
            const auto rep = averaging_sweep(preset, SweepPlan{rc.eps_grid, rc.d_rule, rc.paths, rc.stepper, threads});
            write_report(rc, rep, "averaging");
            const auto summary = io::report_summary(rep);
            io::write_file(rc.output_dir / "summary.txt", summary);
            out << summary;
            return verdict_code(rep.passed());
        }
        if (rc.command == "sweep-khasminskii") {
            const auto rep = khasminskii_diagnostic(preset, rc.d_grid, rc.paths, rc.stepper, threads);
            write_report(rc, rep.path, "khasminskii_path");
            write_report(rc, rep.segment, "khasminskii_segment");
            const auto summary = io::report_summary(rep.path) + "\n" + io::report_summary(rep.segment);
            io::write_file(rc.output_dir / "summary.txt", summary);
            out << summary;
            return verdict_code(rep.passed());
        }
        if (rc.command == "sweep-continuity") {
            const auto rep = continuity_study(preset, rc.delta_grid, rc.paths, rc.stepper, threads);
            write_report(rc, rep, "continuity");
            const auto summary = io::report_summary(rep);
            io::write_file(rc.output_dir / "summary.txt", summary);
            out << summary;
            return verdict_code(rep.passed());
        }
        if (rc.command == "audit") {
            const auto rep = hypothesis_audit(preset, rc.audit);
            const auto summary = io::audit_summary(rep);
            io::write_file(rc.output_dir / "summary.txt", summary);
            out << summary;
            return verdict_code(rep.passed());
        }
    } catch (const SweepAborted& e) {
        io::write_file(rc.output_dir / "diagnostics.txt",
                       fmt::format("{}\n{}\n", e.what(), e.diagnostics));
        throw;
    } catch (const BlowUpError& e) {
        io::write_file(rc.output_dir / "diagnostics.txt", fmt::format("{}\nt = {}, mode = {}\n", e.what(), e.t, e.mode));
        throw;
    }
    throw ConfigError(fmt::format("unknown command '{}'", rc.command));
}

/// A flag bound to a config key.
struct Binding {
    std::string key;
    std::string value;
    CLI::App* sub = nullptr;
    CLI::Option* opt = nullptr;
};

}  // namespace detail

/// Full entry point; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Averaging-principle experiments for stochastic functional PDEs with infinite delay", "avg_sfpde"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::version);

    std::list<detail::Binding> bindings;
    std::map<CLI::App*, std::string> config_paths;
    std::map<CLI::App*, std::string> out_dirs;
    std::map<CLI::App*, bool> deterministic;

    auto bind = [&](CLI::App* sub, const std::string& flag, const std::string& key, const std::string& help) {
        bindings.push_back({key, {}, sub, nullptr});
        bindings.back().opt = sub->add_option(flag, bindings.back().value, help + " [" + key + "]");
    };
    auto common = [&](CLI::App* sub, bool stepping) {
        sub->add_option("--config", config_paths[sub], "INI config file; flags take precedence")
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dirs[sub], "output directory (default: out)");
        bind(sub, "--preset", "run.preset", "preset name");
        bind(sub, "--modes", "run.modes", "Galerkin dimension k for field presets");
        bind(sub, "--seed", "run.seed", "master seed (env AVG_SFPDE_SEED)");
        if (!stepping) return;
        bind(sub, "--format", "run.format", "csv or csv+svg");
        bind(sub, "--threads", "run.threads", "worker threads or auto (env AVG_SFPDE_THREADS)");
        bind(sub, "--dt", "stepper.dt", "time step");
        bind(sub, "--T", "stepper.T", "horizon");
        bind(sub, "--scheme", "stepper.scheme", "explicit_em or semi_implicit_linear");
        bind(sub, "--noise-modes", "stepper.noise_modes", "retained noise coordinates, 0 for all");
    };

    auto* simulate = app.add_subcommand("simulate", "integrate one path and dump its trajectory");
    common(simulate, true);
    bind(simulate, "--eps", "stepper.eps", "time-scale parameter, or none for the averaged system");
    bind(simulate, "--path", "run.path", "path index");
    simulate->add_flag("--deterministic", deterministic[simulate], "drop the noise");

    auto* averaging = app.add_subcommand("sweep-averaging", "E sup |u_eps - u_avg|^2 over an eps grid");
    common(averaging, true);
    bind(averaging, "--eps", "sweep.eps_grid", "comma-separated decreasing eps grid");
    bind(averaging, "--d", "sweep.d_rule", "sqrt_eps or one block length per eps");
    bind(averaging, "--paths", "sweep.paths", "Monte Carlo paths per row");

    auto* khas = app.add_subcommand("sweep-khasminskii", "block-freezing residuals over a d grid");
    common(khas, true);
    bind(khas, "--eps", "stepper.eps", "time-scale parameter, or none");
    bind(khas, "--d", "sweep.d_grid", "comma-separated decreasing block lengths");
    bind(khas, "--paths", "sweep.paths", "Monte Carlo paths");

    auto* cont = app.add_subcommand("sweep-continuity", "dependence on initial data over a delta grid");
    common(cont, true);
    bind(cont, "--eps", "stepper.eps", "time-scale parameter, or none");
    bind(cont, "--delta", "sweep.delta_grid", "comma-separated decreasing perturbation sizes");
    bind(cont, "--paths", "sweep.paths", "Monte Carlo paths");

    auto* audit = app.add_subcommand("audit", "sampled checks of the structural hypotheses");
    common(audit, false);
    bind(audit, "--holder-trials", "audit.holder_trials", "sampled pairs for the Hoelder check");
    bind(audit, "--h5-trials", "audit.h5_trials", "sampled pairs for the pairing check");
    bind(audit, "--growth-trials", "audit.growth_trials", "samples for the growth check");
    bind(audit, "--coercivity-trials", "audit.coercivity_trials", "samples for the coercivity probe");
    bind(audit, "--monotone-trials", "audit.monotone_trials", "pairs for the monotonicity probe");

    auto* list = app.add_subcommand("list-presets", "print the shipped preset names");
    bool list_all = false;
    list->add_flag("--all", list_all, "include diagnostic presets");

    auto* replay = app.add_subcommand("replay", "re-run from a manifest.ini");
    std::string replay_path;
    replay->add_option("manifest", replay_path, "manifest written by an earlier run")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--out", out_dirs[replay], "output directory (default: out)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_pass : exit_error;
    }

    try {
        if (list->parsed()) {
            for (const auto& n : preset_names(list_all)) out << n << '\n';
            return exit_pass;
        }
        CLI::App* sub = app.get_subcommands().front();
        RawConfig raw;
        std::string command = sub->get_name();
        if (sub == replay) {
            raw = read_config(replay_path);
            const auto it = raw.find("run.command");
            if (it == raw.end()) throw ConfigError("run.command: manifest names no command");
            command = detail::trim(it->second);
            if (!command_keys().count(command)) throw ConfigError(fmt::format("run.command: unknown '{}'", command));
        } else if (!config_paths[sub].empty()) {
            raw = read_config(config_paths[sub]);
        }
        // a manifest is replayed as written, without environment overrides
        const auto& keys = command_keys().at(command);
        if (const char* s = std::getenv("AVG_SFPDE_SEED"); s && *s && sub != replay) raw["run.seed"] = s;
        if (const char* s = std::getenv("AVG_SFPDE_THREADS"); s && *s && sub != replay && keys.count("run.threads"))
            raw["run.threads"] = s;
        for (const auto& b : bindings)
            if (b.sub == sub && b.opt->count() > 0) raw[b.key] = b.value;
        if (deterministic.count(sub) && deterministic[sub]) raw["stepper.deterministic"] = "true";
        RunConfig rc = resolve(command, raw);
        if (!out_dirs[sub].empty()) rc.output_dir = out_dirs[sub];
        return detail::execute(rc, out);
    } catch (const SweepAborted& e) {
        err << "error: " << e.what() << "\n" << e.diagnostics << "\n";
        return exit_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_error;
    }
}

}  // namespace avgsfpde::cli

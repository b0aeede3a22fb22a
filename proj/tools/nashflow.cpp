// Command-line runner for NE-seeking experiments.
//
//   nashflow run <config|bundled-name> [--out DIR]
//   nashflow validate <config>
//   nashflow examples
//   nashflow --batch <dir> [--out DIR]

#include "nashflow/experiment.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace nashflow;

namespace {

struct Outcome {
    int code = kExitOk;
    std::string report;
};

Outcome run_one(const fs::path& path, const fs::path& out_dir) {
    Outcome o;
    try {
        const Experiment ex = build_experiment(load_experiment(path));
        const RunResult r = run_experiment(ex, out_dir);
        const auto& s = r.summary;
        o.code = r.exit_code;
        o.report = fmt::format("{}: {} at t = {:.6g}; |x - x*|inf = {:.3e}, residual = {:.3e}", ex.config.name,
                               to_string(s.termination), s.diverged ? r.trajectory.divergence_time : s.final_time,
                               s.final_ne_distance, s.final_residual);
        if (ex.graph) o.report += fmt::format(", consensus = {:.3e}", s.final_consensus_error);
        o.report += fmt::format("\n  wrote {} and {}", r.csv_path.string(), r.summary_path.string());
    } catch (const ConfigError& e) {
        o.code = kExitConfigError;
        o.report = fmt::format("{}: {}", path.string(), e.what());
    } catch (const std::exception& e) {
        o.code = kExitConfigError;
        o.report = fmt::format("{}: error: {}", path.string(), e.what());
    }
    return o;
}

int cmd_run(const std::string& target, const std::optional<fs::path>& out) {
    const auto path = resolve_config(target);
    if (!path) {
        fmt::print(stderr, "no config file or bundled example named '{}'\n", target);
        return kExitConfigError;
    }
    const Outcome o = run_one(*path, out.value_or(fs::path("runs") / path->stem()));
    fmt::print(o.code == kExitConfigError ? stderr : stdout, "{}\n", o.report);
    return o.code;
}

int cmd_validate(const std::string& target) {
    const auto path = resolve_config(target);
    if (!path) {
        fmt::print(stderr, "no config file or bundled example named '{}'\n", target);
        return kExitConfigError;
    }
    try {
        const auto diags = validate_experiment(load_experiment(*path));
        for (const auto& d : diags) fmt::print("{}: {}\n", path->string(), d.to_string());
        if (diags.empty()) fmt::print("{}: ok\n", path->string());
        return diags.empty() ? kExitOk : kExitConfigError;
    } catch (const ConfigError& e) {
        fmt::print("{}: {}\n", path->string(), e.what());
        return kExitConfigError;
    }
}

int cmd_examples() {
    for (const auto& e : list_examples()) fmt::print("{:<28} {}\n", e.name, e.description);
    return kExitOk;
}

int cmd_batch(const fs::path& dir, const std::optional<fs::path>& out) {
    std::vector<fs::path> configs;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".toml") configs.push_back(entry.path());
    }
    if (ec || configs.empty()) {
        fmt::print(stderr, "no .toml configs in {}\n", dir.string());
        return kExitConfigError;
    }
    std::sort(configs.begin(), configs.end());

    const fs::path root = out.value_or(fs::path("runs"));
    std::vector<Outcome> outcomes(configs.size());
    std::atomic<std::size_t> next{0};
    const unsigned n_workers = std::clamp<unsigned>(std::thread::hardware_concurrency(), 1u,
                                                    static_cast<unsigned>(configs.size()));
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < n_workers; ++w) {
        workers.emplace_back([&] {
            for (std::size_t k = next++; k < configs.size(); k = next++) {
                outcomes[k] = run_one(configs[k], root / configs[k].stem());
            }
        });
    }
    for (auto& t : workers) t.join();

    int worst = kExitOk;
    for (const auto& o : outcomes) {
        fmt::print("[exit {}] {}\n", o.code, o.report);
        worst = std::max(worst, o.code);
    }
    return worst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed Nash equilibrium seeking experiments"};
    app.require_subcommand(0, 1);
    app.fallthrough();

    std::optional<fs::path> out;
    std::optional<fs::path> batch;
    app.add_option("--out", out, "Output directory (default: runs/<config name>)");
    app.add_option("--batch", batch, "Run every .toml config in a directory in parallel");

    std::string run_target;
    auto* run = app.add_subcommand("run", "Integrate one experiment and write CSV + JSON summary");
    run->add_option("config", run_target, "Config path or bundled example name")->required();

    std::string validate_target;
    auto* validate = app.add_subcommand("validate", "Check a config without integrating");
    validate->add_option("config", validate_target, "Config path or bundled example name")->required();

    auto* examples = app.add_subcommand("examples", "List the bundled example configs");

    CLI11_PARSE(app, argc, argv);

    if (batch) {
        if (!app.get_subcommands().empty()) {
            fmt::print(stderr, "--batch cannot be combined with a subcommand\n");
            return kExitConfigError;
        }
        return cmd_batch(*batch, out);
    }
    if (*run) return cmd_run(run_target, out);
    if (*validate) return cmd_validate(validate_target);
    if (*examples) return cmd_examples();
    fmt::print("{}", app.help());
    return kExitConfigError;
}

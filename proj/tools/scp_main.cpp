#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "scp/kernels.hpp"
#include "scp/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    long long seed = -1;
    int replicates = -1;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config JSON (or a manifest)")
        ->required();
    cmd->add_option("--out", opts.out_dir, "output directory for the artifact bundle");
    cmd->add_option("--seed", opts.seed, "override the config seed");
    cmd->add_option("--replicates", opts.replicates, "override the config replicate count");
    cmd->add_flag("--serial", opts.serial, "run the serial reference kernels");
}

int run(const CommonOpts& opts, const std::string& expected_kind) {
    scp::ExperimentConfig config = scp::load_config(opts.config_path);
    if (config.experiment != expected_kind)
        throw scp::ConfigError("config declares experiment '" + config.experiment +
                               "' but the '" + expected_kind + "' subcommand was invoked");
    if (opts.seed >= 0) config.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.replicates >= 1) config.replicates = opts.replicates;
    if (opts.serial) scp::kernels::set_default_exec(scp::kernels::Exec::serial);

    const scp::RunResult result = scp::run_experiment(config, opts.out_dir);
    std::printf("%s\n", result.summary.c_str());
    for (const auto& f : result.outputs) std::printf("  wrote %s/%s\n", opts.out_dir.c_str(), f.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistical calibration solver and diagnostics"};
    app.require_subcommand(1);

    const std::pair<const char*, const char*> kinds[] = {
        {"solve", "run the calibration solver on synthetic observations"},
        {"stability", "two solves on a common partition; stability metrics"},
        {"local-limit", "per-stage solution TV against a limit solve"},
        {"weak", "test-function integrals against a constructed limit"},
        {"audit", "report-only checks of the standing assumptions"},
        {"concrete", "calibrate the strength power law from a CSV dataset"},
    };
    CommonOpts opts[6];
    std::string chosen;
    for (int i = 0; i < 6; ++i) {
        CLI::App* cmd = app.add_subcommand(kinds[i].first, kinds[i].second);
        add_common(cmd, opts[i]);
        const std::string kind = kinds[i].first;
        cmd->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    }

    try {
        for (int i = 0; i < 6; ++i) {
            if (chosen == kinds[i].first) {
                // config keys use local_limit; the CLI spells it local-limit
                std::string kind = chosen;
                if (kind == "local-limit") kind = "local_limit";
                return run(opts[i], kind);
            }
        }
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const scp::ScpError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
}

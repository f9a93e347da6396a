// evimem: run streaming experiments on the toy view-conditioned generator.
//
//   evimem run     [--config f] [--strategy s] [--seeds n] [--out p] [--format csv|json] [--no-timing] [--set k=v]...
//   evimem compare [--config f] [--seeds n] [--out p] [--format csv|json] [--no-timing] [--set k=v]...
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include "evimem/config.hpp"
#include "evimem/errors.hpp"
#include "evimem/experiment.hpp"
#include "evimem/results.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
    std::string config_path;
    std::size_t seeds = 1;
    std::optional<std::string> out;
    std::optional<std::string> format;
    bool no_timing = false;
    std::vector<std::string> overrides;
};

void add_common(CLI::App& cmd, CommonOptions& opts) {
    cmd.add_option("--config", opts.config_path, "key=value configuration file");
    cmd.add_option("--seeds", opts.seeds, "number of independent seed replicates")->check(CLI::PositiveNumber);
    cmd.add_option("--out", opts.out, "output path ('-' for stdout)");
    cmd.add_option("--format", opts.format, "csv or json");
    cmd.add_flag("--no-timing", opts.no_timing, "write wall_ms as 0 for byte-stable output");
    cmd.add_option("--set", opts.overrides, "override a configuration key (key=value)");
}

evimem::ExperimentConfig resolve(const CommonOptions& opts, const std::optional<std::string>& strategy) {
    evimem::ExperimentConfig config =
        opts.config_path.empty() ? evimem::parse_config("") : evimem::load_config_file(opts.config_path);
    std::vector<std::string> overrides = opts.overrides;
    if (strategy) overrides.push_back("strategy=" + *strategy);
    if (opts.out) overrides.push_back("output=" + *opts.out);
    if (opts.format) overrides.push_back("format=" + *opts.format);
    evimem::apply_overrides(config, overrides);
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Streaming evidential-memory simulator"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    std::optional<std::string> strategy;
    auto* run = app.add_subcommand("run", "run one strategy and write per-chunk metrics");
    add_common(*run, run_opts);
    run->add_option("--strategy", strategy,
                    "evidential, single_last_view, last_chunk, random_k or full_history_oracle");

    CommonOptions compare_opts;
    auto* compare = app.add_subcommand("compare", "run every strategy on shared seeds");
    add_common(*compare, compare_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "evimem: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const bool is_run = run->parsed();
        const CommonOptions& opts = is_run ? run_opts : compare_opts;
        const evimem::ExperimentConfig config = resolve(opts, is_run ? strategy : std::nullopt);
        const evimem::ResultTable table =
            is_run ? evimem::run_table(config, opts.seeds) : evimem::compare_table(config, opts.seeds);
        evimem::write_results(table, config, config.output_path, config.format, !opts.no_timing);
    } catch (const evimem::config_error& e) {
        std::cerr << "evimem: config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "evimem: error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}

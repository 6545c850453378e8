#include <CLI11.hpp>
#include <iostream>

#include "znl/commands.hpp"

// Batch front-end: every analysis is a subcommand over a JSON experiment
// config, with dotted-path overrides. Results are plot-ready CSV tables plus
// a run manifest that reproduces the run byte-for-byte.
int main(int argc, char** argv) {
    CLI::App app{"znl - zero-noise limits of stochastic evolution systems"};
    app.require_subcommand(1);

    std::string config_path;
    znl::cli::CliOptions options;
    std::uint64_t seed = 0;

    std::vector<CLI::App*> subs;
    for (const std::string& name : znl::cli::subcommand_names()) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--set", options.sets, "override config entry, dotted.path=value");
        sub->add_option("--out", options.out_dir, "output directory (overrides output.directory)");
        auto* seed_opt = sub->add_option("--seed", seed, "master seed (overrides sim.master_seed)");
        sub->add_option("--threads", options.threads,
                        "worker threads (speed only; ZNL_THREADS is the default)");
        sub->parse_complete_callback([&options, &seed, seed_opt]() {
            if (seed_opt->count() > 0) options.seed = seed;
        });
        subs.push_back(sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : znl::cli::kConfigError;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        znl::cli::Json raw = znl::cli::load_config_file(config_path);
        return znl::cli::run_subcommand(name, raw, options);
    } catch (const znl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return znl::cli::kConfigError;
    }
}

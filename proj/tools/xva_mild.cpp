#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "xva/app/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Pre-default XVA valuation by Picard iteration of the mild solution"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(XVA_MILD_VERSION));

    xva::app::CommandOptions options;
    if (const char* env = std::getenv("XVA_MILD_THREADS")) {
        try {
            options.threads = std::stoi(env);
        } catch (const std::exception&) {
            std::cerr << "xva_mild: ignoring XVA_MILD_THREADS='" << env << "'\n";
        }
    }
    std::uint64_t seed = 0;

    const char* names[] = {"simulate", "defaults", "solve", "verify", "price"};
    const char* help[] = {"simulate (X, V) paths and report moments", "survival, hazard and first-default density",
                          "solve for the pre-default value on the grid", "run the property checks for a config",
                          "solve and report the value at (t0, s0, v0)"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", options.config_path, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", options.threads, "worker cap (0 = all cores)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", seed, "override mc.master_seed");
        if (std::string(names[i]) == "verify") {
            sub->add_option("--compare", options.compare_path, "config with a raised dividend for the comparison check")
                ->check(CLI::ExistingFile);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : xva::app::kValidation;
    }

    CLI::App* chosen = app.get_subcommands().front();
    if (chosen->count("--seed") > 0) options.seed = seed;
    return xva::app::run_command(chosen->get_name(), options);
}

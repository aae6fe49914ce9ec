#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lamekit/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"lamekit: elastic wave simulation, wave-type splitting and plate models"};
    app.require_subcommand(1);

    lamekit::CommandOptions opt;
    std::uint64_t seed = 0;
    std::string command;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "Configuration file")->required();
        sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
        sub->add_flag("--serial", opt.serial, "Force the serial reference mode");
        sub->add_option("--seed", seed, "Seed for random initial data (overrides run.seed)");
        sub->callback([&command, sub] { command = sub->get_name(); });
    };
    add_common(app.add_subcommand("simulate", "Run the elastodynamic solver and write snapshots"));
    add_common(app.add_subcommand("decompose", "Split a displacement trajectory into P and S parts"));
    add_common(app.add_subcommand("plate", "Plate frequency tables and dispersion curves"));
    auto* verify = app.add_subcommand("verify", "Run a verification suite");
    add_common(verify);
    verify->add_option("suite", opt.suite, "operators | decomposition | waves | plate | energy | all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return lamekit::kExitUsage;
    }
    for (auto* sub : app.get_subcommands())
        if (sub->count("--seed")) opt.seed = seed;
    return lamekit::run_command(command, opt, std::cout, std::cerr);
}

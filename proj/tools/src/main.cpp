#include "config.hpp"
#include "experiments.hpp"
#include "logging.hpp"

#include "curvebound/types.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>

using namespace curvebound;
using namespace curvebound::cli;

int main(int argc, char** argv) {
    std::string log_error;
    if (!init_logging(std::getenv("CURVEBOUND_LOG"), log_error)) {
        std::cerr << "error: " << log_error << '\n';
        return exit_validation;
    }

    CLI::App app{"Robin Laplacian double-well experiments"};
    app.require_subcommand(1);
    std::string config_path;
    RunOptions opts;
    struct Command {
        CLI::App* app;
        std::optional<ExperimentKind> kind;
    };
    std::vector<Command> commands;
    auto add = [&](const std::string& name, const std::string& help, std::optional<ExperimentKind> kind) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", config_path, "JSON experiment config")->required();
        if (kind) {
            sub->add_option("--out", opts.out, "output directory")->capture_default_str();
            sub->add_option("--threads", opts.threads, "parallel ladder points")->capture_default_str();
            sub->add_flag("--dense-fallback", opts.dense_fallback, "retry failed sparse eigensolves densely");
        }
        commands.push_back({sub, kind});
    };
    add("splitting", "2D, effective 1D, closed-form and interaction splittings", ExperimentKind::splitting);
    add("single-well", "single-well ground state and gap", ExperimentKind::single_well);
    add("wkb-residual", "WKB quasimode residual", ExperimentKind::wkb_residual);
    add("weyl", "eigenvalue counts and brackets", ExperimentKind::weyl);
    add("decay", "normal and tangential decay rates", ExperimentKind::decay);
    add("validate", "check a config without running it", std::nullopt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    for (const Command& cmd : commands) {
        if (!cmd.app->parsed()) continue;
        try {
            const ExperimentConfig config = load_config(config_path);
            if (!cmd.kind) {
                std::cout << "valid " << kind_name(config.kind) << " config, " << config.ladder.size()
                          << " ladder points\n";
                return exit_ok;
            }
            if (config.kind != *cmd.kind)
                throw ValidationError("config describes a " + kind_name(config.kind) + " experiment, not " +
                                      kind_name(*cmd.kind));
            return run_experiment(config, opts, std::cout);
        } catch (const ValidationError& e) {
            spdlog::error("validation: {}", e.what());
            return exit_validation;
        } catch (const std::exception& e) {
            spdlog::error("{}", e.what());
            return exit_solver;
        }
    }
    return exit_validation;
}

#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "coherentcast/config.hpp"
#include "coherentcast/errors.hpp"
#include "coherentcast/pipeline.hpp"

namespace cc = coherentcast;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

using Command = std::function<void(const cc::RunConfig&, std::ostream&)>;

const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table{
        {"ingest", cc::cmd_ingest},
        {"train-base", cc::cmd_train_base},
        {"forecast", cc::cmd_forecast},
        {"train-reconciler", cc::cmd_train_reconciler},
        {"evaluate", cc::cmd_evaluate},
        {"sweep-activations", cc::cmd_sweep_activations},
    };
    return table;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent hierarchical probabilistic forecasting"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> horizon;
    std::optional<std::string> weight_mode;
    std::optional<std::size_t> scenarios;
    std::optional<std::string> out_dir;
    std::optional<std::size_t> workers;

    for (const auto& [name, _] : commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "key=value config file")->required();
        sub->add_option("--seed", seed, "random seed");
        sub->add_option("--horizon", horizon, "forecast horizon in hours")->check(CLI::IsMember({24, 48, 72, 96}));
        sub->add_option("--weight-mode", weight_mode, "reconciler weight mode")->check(CLI::IsMember({"dcl", "coef", "id"}));
        sub->add_option("--scenarios", scenarios, "scenario count per origin");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--workers", workers, "worker threads");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    try {
        if (!std::filesystem::exists(config_path)) throw cc::InputError(config_path, 0, "config file not found");
        cc::RunConfig cfg = cc::load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (horizon) cfg.horizon = *horizon;
        if (weight_mode) cfg.weight_mode = cc::parse_weight_mode(*weight_mode);
        if (scenarios) cfg.scenarios = *scenarios;
        if (out_dir) cfg.out_dir = *out_dir;
        if (workers) cfg.workers = *workers;
        if (name == "forecast" && cfg.scenarios == 0) throw cc::ConfigError("--scenarios must be at least 1");
        cfg.validate();
        commands().at(name)(cfg, std::cout);
        return 0;
    } catch (const cc::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const cc::InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
}

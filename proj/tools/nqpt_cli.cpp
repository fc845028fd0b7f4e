// nqpt <command> [--config file] [--<key> value ...]
#include "nqpt/config.hpp"
#include "nqpt/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

int main(int argc, char** argv) {
    CLI::App app{"Steady states, hysteresis, spectra and entanglement of the atom-membrane system"};
    std::string command;
    std::string config_path;
    app.add_option("command", command, "steady | landau | sweep | phase-diagram | spectrum | entangle | gpe | validate")
        ->required();
    app.add_option("--config", config_path, "key = value parameter file")->check(CLI::ExistingFile);

    std::map<std::string, std::optional<std::string>> flags;
    for (const auto& key : nqpt::config_keys()) {
        if (key == "command") continue;
        flags[key];
        app.add_option("--" + key, flags[key], "override '" + key + "'");
    }
    CLI11_PARSE(app, argc, argv);

    nqpt::Overrides overrides{{"command", command}};
    for (const auto& key : nqpt::config_keys())
        if (const auto it = flags.find(key); it != flags.end() && it->second) overrides.emplace_back(key, *it->second);

    nqpt::ExperimentConfig cfg;
    try {
        cfg = config_path.empty() ? nqpt::parse_config("", overrides) : nqpt::load_config(config_path, overrides);
    } catch (const nqpt::Error& e) {
        std::cerr << "nqpt: " << e.what() << '\n';
        return nqpt::exit_code(e.kind());
    }
    try {
        for (const auto& path : nqpt::run(cfg)) std::cout << path << '\n';
    } catch (const nqpt::Error& e) {
        std::cerr << "nqpt " << command << ": " << e.what() << '\n';
        return nqpt::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "nqpt " << command << ": " << e.what() << '\n';
        return 1;
    }
    return 0;
}

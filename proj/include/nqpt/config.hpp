#pragma once

#include "nqpt/model.hpp"
#include "nqpt/steadystate.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nqpt {

enum class Command { steady, landau, sweep, phase_diagram, spectrum, entangle, gpe, validate };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

// How lambda-like keys (lambda, lambda_lo, lambda_hi, lambda_list) are read.
enum class LambdaUnit { absolute, lambda_s2 };

// Which steady states feed the spectrum command.
enum class SpectrumSource { minimal, forward, backward };

struct ExperimentConfig {
    Command command = Command::steady;
    SystemParams params;
    LambdaUnit lambda_unit = LambdaUnit::absolute;

    std::optional<double> lambda_lo, lambda_hi;
    int points = 101;
    std::vector<double> lambda_list;

    int surface_grid = kDefaultSurfaceGrid;
    double jump_threshold = 0.05;

    ScanAxis axis = ScanAxis::V;
    std::optional<double> axis_lo, axis_hi;
    int axis_points = 21;
    std::optional<double> omega_a_lo, omega_a_hi;
    int omega_a_points = 21;
    CritMode mode = CritMode::exact_numeric;

    SpectrumSource source = SpectrumSource::minimal;
    int mode_a = 0;  // entanglement pair, 0 membrane, 1 atomic, 2 breathing
    int mode_b = 1;

    int n_grid = 512;
    double dtau = 1e-4;
    long max_steps = 100000;
    bool check_grid = true;

    unsigned threads = 1;
    std::string out = ".";

    bool operator==(const ExperimentConfig&) const = default;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Names accepted in files and as --<key> overrides.
const std::vector<std::string>& config_keys();

// Flat key = value text, one pair per line, '#' starts a comment. Overrides
// are applied after the file. Throws Error(Parse/UnknownKey/MissingRequired).
ExperimentConfig parse_config(const std::string& text, const Overrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const Overrides& overrides = {});

// key = value lines that parse back to the same config. Keys in `skip` are
// left out (used for the CSV parameter echo).
std::string serialize(const ExperimentConfig& cfg, const std::vector<std::string>& skip = {});

} // namespace nqpt

#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pmqkd/circuit.hpp"
#include "pmqkd/rates.hpp"
#include "pmqkd/sim.hpp"

// Command-line and config-file front end. Flags override file values; the
// file is a flat key=value format with one [section] per command (see
// README). Unknown keys are errors with a line/column diagnostic.

namespace pmqkd::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HelpRequested {
    std::string text;
};

enum class Command { verify, rates, simulate, attack_sweep };

// "v" for a single value, "start:stop:step" for an inclusive range.
struct GridSpec {
    std::vector<double> values;
    bool is_range = false;
};
GridSpec parse_grid(const std::string& text);

struct VerifyOptions {
    circuit::CircuitParams params;
    double eta = 0.1;  // channel for the cross-module phase-error check
};

struct RatesOptions {
    std::optional<GridSpec> mu;
    std::optional<GridSpec> eta_db;
    double f = 1.15;
    double e_bit = 0.0;
    bool fig4a = false;
    bool fig4b = false;
};

struct SimulateOptions {
    sim::ProtocolParams params;
    sim::Adversary adversary = sim::Adversary::none;
    bool round_log = false;
};

struct AttackSweepOptions {
    rates::SweepAxis axis = rates::SweepAxis::eta_db;
    std::vector<double> values;
    sim::ProtocolParams base;  // mu_a/mu_b or eta replaced per grid point
};

struct RunConfig {
    Command command = Command::rates;
    std::filesystem::path output_dir = ".";
    bool emit_svg = false;
    bool clamp_rates = false;
    int csv_precision = 12;
    std::variant<VerifyOptions, RatesOptions, SimulateOptions, AttackSweepOptions> options;
};

// Parses argv-style arguments (without the program name). Throws ConfigError
// for invalid input (exit code 2) and HelpRequested for --help.
RunConfig parse_config(const std::vector<std::string>& args);

}  // namespace pmqkd::cli

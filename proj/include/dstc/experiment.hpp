#pragma once

// Experiment driver behind the `dstc` command-line tool.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dstc/io.hpp"
#include "dstc/stc.hpp"
#include "dstc/synthesis.hpp"
#include "dstc/system.hpp"

namespace dstc {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitSynthesis = 3,
    kExitMonitor = 4,
    kExitNumerical = 5,
};

struct SynthesisBlock {
    std::vector<double> epsilons;
    double l_const = 0.05;
    int grid_density = 24;
    int verify_density = 0;  ///< 0 means 2 * grid_density
    int random_points = 20000;
};

struct RunBlock {
    std::vector<Vector> x0;
    double t_end = 15.0;
    std::optional<double> dt_flow;  ///< default t_min / 32
    double count_window = 5.0;
    bool static_baseline = true;
    bool periodic_baseline = true;
};

struct ExperimentConfig {
    json system_doc;
    SystemSpec system;
    double delta = 0.999;
    double eps_ref = 0.01;
    int m = 30;
    double c = 0.0;
    EtaInit eta_init = EtaInit::current_value;
    std::vector<double> eta_values;
    bool has_synthesis = false;
    SynthesisBlock synthesis;
    RunBlock run;
    std::string output_dir = "out";

    /// StcConfig for window length m (the static baseline uses m = 1).
    [[nodiscard]] StcConfig stc(const ParameterFamily& family, int window) const;
};

/// Parses and validates a config document. Throws ConfigError on any violation.
[[nodiscard]] ExperimentConfig parse_config(const json& doc);
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

struct CommandOptions {
    std::optional<std::string> out;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// Each command returns an exit code; errors are mapped by run_command.
int cmd_synthesize(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out);
int cmd_run(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out);
int cmd_compare(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out);
int cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opt, std::ostream& out);

/// Loads the config, dispatches `command` and maps exceptions to exit codes
/// (ConfigError/DomainError 2, SynthesisError 3, numerical errors 5).
int run_command(const std::string& command, const std::string& config_path, const CommandOptions& opt,
                std::ostream& out, std::ostream& err);

}  // namespace dstc

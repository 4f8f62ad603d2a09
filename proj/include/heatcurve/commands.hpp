#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heatcurve/report.hpp"
#include "heatcurve/tube.hpp"

namespace heatcurve {

enum class Command { expand, direct, tube, compare, oracle };

std::string to_string(Command command);
Command parse_command(std::string_view name);

/// Every experiment setting. Unset optionals take per-command defaults in
/// resolve(); keys match the long flag names without dashes.
struct ExperimentConfig {
    Command command = Command::expand;
    std::string curve = "circle";
    std::optional<double> radius;
    std::optional<std::vector<double>> axes;   // ellipse a,b
    std::optional<std::vector<double>> torus;  // trefoil R,r
    std::string coeffs_file;
    double tol = 1e-10;       // direct quadrature, relative
    double tube_tol = 1e-3;   // tube integrators, relative
    std::uint64_t seed = 1;
    std::optional<std::vector<double>> eps;
    std::optional<double> tmin, tmax;
    std::optional<int> tsteps;
    std::optional<double> tfixed;
    std::optional<std::vector<double>> lambda;
    TubeBackend backend = TubeBackend::product;
    std::int64_t samples = 1 << 16;
    int replicas = 8;
    int n_s = 8, n_theta = 16, n_r = 24, n_inner = 40;
    std::string out, svg;

    /// Applies key=value; throws ConfigurationError naming `where` on a bad key or value.
    void set(std::string_view key, std::string_view value, std::string_view where);
    /// Fills command defaults and checks every field.
    void resolve();
    /// Sorted key=value lines of all numeric settings (paths excluded); input to the config hash.
    std::string canonical() const;
};

/// Parses a key=value file body; '#' starts a comment. Diagnostics carry `name:line`.
void apply_config_text(ExperimentConfig& config, std::string_view text, std::string_view name);

/// Builds the report for config.command. On a numerical error the report
/// holds the rows finished so far, is marked partial, and the error is rethrown.
void run_command(const ExperimentConfig& config, Report& report, PlotSpec* plot = nullptr);

/// Runs, writes --out (or stdout) and --svg, and maps errors to exit codes:
/// 0 success, 1 configuration error, 2 numerical failure.
int execute(const ExperimentConfig& config, std::string& diagnostics);

}  // namespace heatcurve

#pragma once

#include "delaylim/estimator.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace delaylim {

struct SweepAxis {
    std::string name;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
};

/// Everything that defines one run or sweep; every field is echoed into the
/// structured result file.
struct RunConfig {
    std::string system = "duffing";
    std::map<std::string, double> params;  ///< overrides of the built-in defaults
    std::vector<SweepAxis> axes;           ///< up to two swept parameters

    std::vector<double> lower, upper;  ///< empty selects the per-system default box
    int n_disc = 501;
    int r = 30;
    int n_iter = 50;
    double t_max = 1000.0;
    int bisection_steps = 5;
    InitialKind init = InitialKind::FreeVibration;
    std::vector<double> weights;  ///< empty selects the energy-based defaults

    double dwell_factor = 1.0;
    double ghost_factor = 2.0;
    int neighborhood_radius = 1;
    int n_tau = 10;
    int k_rep = 2;
    int m_match = 0;
    bool reuse = true;

    std::uint64_t seed = 0;
    int jobs = 1;
    std::string out;  ///< output path prefix; empty writes no files
};

struct SweepRow {
    std::vector<std::pair<std::string, double>> values;  ///< swept parameter values
    std::uint64_t seed = 0;
    double lim = 0.0;
    std::string status;  ///< ok | boundary | unstable | error: ...
    int n_traj = 0;
    long n_steps = 0;
    double wall_s = 0.0;
    double boundary_radius = 0.0;
    std::vector<double> lim_history;
    std::vector<std::vector<double>> attractors;
};

struct SweepResult {
    RunConfig config;
    std::vector<SweepRow> rows;
};

/// Independent per-row RNG stream derived from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Builds a named system with parameter overrides applied. Turning systems
/// also accept "Omega" (dimensionless spindle speed), stored as tau = 2 pi / Omega.
std::shared_ptr<const DdeSystem> make_system(const std::string& name,
                                             const std::map<std::string, double>& overrides);

/// Parameter names accepted by a system, in declaration order.
std::vector<std::string> system_parameter_names(const std::string& name);

/// Default grid box for a named system.
void default_bounds(const std::string& name, std::vector<double>& lower,
                    std::vector<double>& upper);

/// Runs one estimation; writes <out>.csv and <out>.json when config.out is set.
LimRunResult run_single(const RunConfig& config);

/// Runs one estimation per sweep grid point, up to config.jobs in parallel.
/// Rows come back in grid order (first axis outermost) regardless of schedule.
SweepResult run_sweep(const RunConfig& config);

/// Writes <prefix>.csv and <prefix>.json; numbers carry 9 significant digits.
void emit(const SweepResult& result, const std::string& prefix);

std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);
RunConfig config_from_json_file(const std::string& path);

std::string sweep_to_csv(const SweepResult& result);
std::string sweep_to_json(const SweepResult& result);

}  // namespace delaylim

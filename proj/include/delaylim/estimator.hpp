#pragma once

#include "delaylim/classify.hpp"
#include "delaylim/initial.hpp"
#include "delaylim/metric.hpp"
#include "delaylim/semidisc.hpp"

#include <limits>
#include <random>
#include <string>

namespace delaylim {

enum class RunStatus {
    Ok,               ///< at least one divergent headpoint bounded the estimate
    BoundaryLimited,  ///< no divergence found; the estimate equals the inscribed radius
    Unstable,         ///< the probe from the equilibrium cell diverged
};

const char* to_string(RunStatus status);

struct EstimatorConfig {
    int n_iter = 50;          ///< total simulated trajectories, probe included
    int bisection_steps = 5;  ///< bisection length after each new divergent headpoint
    std::uint64_t seed = 0;
    InitialKind init_kind = InitialKind::FreeVibration;
    ClassifierParams classifier;
};

struct IterationSummary {
    int index = 0;
    std::string strategy;  ///< probe | random | bisection | closest
    Vector ich;
    double ich_distance = 0.0;
    Classification classification;
    double lim_after = 0.0;
    long steps = 0;
};

struct LimRunResult {
    double lim = 0.0;
    std::vector<double> lim_history;  ///< one entry per iteration, non-increasing
    RunStatus status = RunStatus::Ok;
    double boundary_radius = 0.0;  ///< inscribed radius of the grid in the metric
    int n_trajectories = 0;
    long total_steps = 0;
    std::vector<Vector> attractors;  ///< centers of discovered fixed-point cells
    std::vector<IterationSummary> iterations;
    double wall_seconds = 0.0;
};

/// The minimum rule: a divergent headpoint closer than the current estimate
/// shrinks it; converging headpoints never do.
double update_lim(double current_lim, const Classification& classification, double ich_distance);

/// Random point of the metric ball of the given radius centered at the metric
/// origin. `exponent_dim` = dim draws uniformly in the ball; 2*dim biases the
/// radius toward the boundary.
Vector sample_in_metric_ball(std::mt19937_64& rng, const MetricSpace& metric, double radius,
                             int exponent_dim);

/// Iterative shrinking-hypersphere search for the local integrity measure.
LimRunResult estimate_lim(const std::shared_ptr<const DdeSystem>& system, const SemiDiscMap& map,
                          const MetricSpace& metric, const CellGrid& grid,
                          const EstimatorConfig& config);

}  // namespace delaylim

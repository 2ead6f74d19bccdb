#include "delaylim/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace delaylim {

const char* to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Ok: return "ok";
        case RunStatus::BoundaryLimited: return "boundary";
        case RunStatus::Unstable: return "unstable";
    }
    return "?";
}

double update_lim(double current_lim, const Classification& classification, double ich_distance) {
    if (classification.divergent() && ich_distance < current_lim) {
        return ich_distance;
    }
    return current_lim;
}

Vector sample_in_metric_ball(std::mt19937_64& rng, const MetricSpace& metric, double radius,
                             int exponent_dim) {
    const int dim = metric.dimension();
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Vector z(dim);
    double norm = 0.0;
    do {
        for (int i = 0; i < dim; ++i) z(i) = normal(rng);
        norm = z.norm();
    } while (norm == 0.0);
    const double rho = radius * std::pow(uniform(rng), 1.0 / exponent_dim);
    return metric.from_metric((rho / norm) * z);
}

namespace {

// A probe from the equilibrium cell is resolved scale-free: growing the
// metric distance by this factor marks the equilibrium non-attracting,
// shrinking by it marks convergence. Time-based dwell cannot distinguish
// the two when the growth rate is small.
constexpr double kProbeScaleFactor = 20.0;

struct TrajectoryOutcome {
    Classification classification;
    Vector closest;
    double closest_distance = std::numeric_limits<double>::infinity();
    long steps = 0;
    std::vector<CellRun> cells;
};

TrajectoryOutcome run_trajectory(const SemiDiscMap& map, const MetricSpace& metric,
                                 const CellGrid& grid, const AttractorRegistry& registry,
                                 const ClassifierParams& params, InitialKind kind,
                                 const Vector& ich, bool probe_mode) {
    const InitialHistory history = build_initial_history(kind, ich, map);
    Simulation sim(map, history);
    OnlineClassifier classifier(grid, registry, params, map.system->tau, probe_mode);

    TrajectoryOutcome out;
    out.closest = ich;
    out.closest_distance = metric.distance_to_origin(ich);
    const double probe_scale = std::max(out.closest_distance, 1e-12);
    bool escaped = false;
    double below_since = -1.0;  // oscillations dip through small distances,
                                // so contraction must persist for a delay span

    std::optional<Classification> cls = classifier.feed(0.0, ich);
    while (!cls) {
        if (sim.step() == StepStatus::NonFinite) {
            cls = classifier.on_nonfinite();
            break;
        }
        const double d = metric.distance_to_origin(sim.state());
        if (d < out.closest_distance) {
            out.closest_distance = d;
            out.closest = sim.state();
        }
        if (probe_mode && !escaped) {
            if (d > kProbeScaleFactor * probe_scale) {
                escaped = true;
                classifier.mark_escaped();
            } else if (d < probe_scale / kProbeScaleFactor) {
                if (below_since < 0.0) {
                    below_since = sim.time();
                } else if (sim.time() - below_since > map.system->tau) {
                    cls = Classification{.outcome = Outcome::ConvergedDesired};
                    break;
                }
            } else {
                below_since = -1.0;
            }
        }
        cls = classifier.feed(sim.time(), sim.state());
    }
    out.classification = *cls;
    out.steps = sim.steps();
    out.cells = classifier.compressed_cells();
    return out;
}

Vector probe_headpoint(std::mt19937_64& rng, const CellGrid& grid, const Vector& equilibrium) {
    const auto idx = grid.indices(grid.cell_of(equilibrium));
    const Vector widths = grid.cell_widths();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Vector point(grid.dimension());
    for (int k = 0; k < grid.dimension(); ++k) {
        point(k) = grid.lower()(k) + (idx[k] + uniform(rng)) * widths(k);
    }
    return point;
}

enum class Phase { RandomUniform, Bisect, Closest, RandomBoundary };

}  // namespace

LimRunResult estimate_lim(const std::shared_ptr<const DdeSystem>& system, const SemiDiscMap& map,
                          const MetricSpace& metric, const CellGrid& grid,
                          const EstimatorConfig& config) {
    const auto t_start = std::chrono::steady_clock::now();
    if (!system) throw InvalidInput("estimate_lim: null system");
    if (config.n_iter < 1) throw InvalidParameter("estimate_lim: n_iter must be >= 1");
    if (!grid.contains(system->equilibrium)) {
        throw ConfigError("estimate_lim: the desired equilibrium lies outside the grid bounds");
    }
    if (config.init_kind == InitialKind::FreeVibration && !system->modes) {
        throw UnsupportedOperation(
            "estimate_lim: free-vibration initial functions need vibration modes; "
            "system '" + system->name + "' has none (choose another --init kind)");
    }

    const Vector& eq = system->equilibrium;
    const double r_box = inscribed_radius(metric, grid.lower(), grid.upper());
    const double cell_diag = metric.length(grid.cell_widths());
    const int dim = grid.dimension();

    AttractorRegistry registry(grid, eq, config.classifier.neighborhood_radius,
                               config.classifier.effective_m_match());
    std::mt19937_64 rng(config.seed);

    LimRunResult result;
    result.boundary_radius = r_box;

    double lim = std::numeric_limits<double>::infinity();
    const auto clamp = [&] { return std::min(lim, r_box); };

    // Iteration 0 probes the equilibrium cell itself: a divergent probe means
    // the equilibrium does not attract even cell-sized perturbations.
    {
        const Vector ich = probe_headpoint(rng, grid, eq);
        const TrajectoryOutcome probe = run_trajectory(map, metric, grid, registry,
                                                       config.classifier, config.init_kind,
                                                       ich, /*probe_mode=*/true);
        result.total_steps += probe.steps;
        ++result.n_trajectories;
        IterationSummary summary;
        summary.index = 0;
        summary.strategy = "probe";
        summary.ich = ich;
        summary.ich_distance = metric.distance_to_origin(ich);
        summary.classification = probe.classification;
        if (probe.classification.divergent()) {
            lim = 0.0;
            result.status = RunStatus::Unstable;
            summary.lim_after = 0.0;
            result.iterations.push_back(std::move(summary));
            result.lim_history.push_back(0.0);
            result.lim = 0.0;
            result.wall_seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
            return result;
        }
        summary.lim_after = clamp();
        summary.steps = probe.steps;
        result.iterations.push_back(std::move(summary));
        result.lim_history.push_back(clamp());
    }

    Phase phase = Phase::RandomUniform;
    Vector bisect_target;
    double bisect_lo = 0.0, bisect_hi = 1.0, bisect_frac = 0.5;
    int bisect_left = 0;

    long last_divergent_iter = -1;
    long closest_consumed_iter = -1;
    Vector last_divergent_closest;
    double last_divergent_closest_distance = std::numeric_limits<double>::infinity();

    const auto begin_bisect = [&](const Vector& target) {
        if (config.bisection_steps < 1) {
            phase = Phase::Closest;
            return;
        }
        bisect_target = target;
        bisect_lo = 0.0;
        bisect_hi = 1.0;
        bisect_left = config.bisection_steps;
        phase = Phase::Bisect;
    };

    for (int iter = 1; iter < config.n_iter; ++iter) {
        if (phase == Phase::Closest) {
            const bool eligible = last_divergent_iter >= 0 &&
                                  last_divergent_iter != closest_consumed_iter &&
                                  last_divergent_closest_distance + cell_diag < lim &&
                                  grid.contains(last_divergent_closest);
            if (!eligible) phase = Phase::RandomBoundary;
        }

        Vector ich;
        std::string strategy;
        switch (phase) {
            case Phase::RandomUniform:
                ich = sample_in_metric_ball(rng, metric, clamp(), dim);
                strategy = "random";
                break;
            case Phase::Bisect:
                bisect_frac = 0.5 * (bisect_lo + bisect_hi);
                ich = eq + bisect_frac * (bisect_target - eq);
                strategy = "bisection";
                break;
            case Phase::Closest:
                ich = last_divergent_closest;
                closest_consumed_iter = last_divergent_iter;
                strategy = "closest";
                break;
            case Phase::RandomBoundary:
                ich = sample_in_metric_ball(rng, metric, clamp(), 2 * dim);
                strategy = "random";
                break;
        }

        const TrajectoryOutcome outcome = run_trajectory(map, metric, grid, registry,
                                                         config.classifier, config.init_kind,
                                                         ich, /*probe_mode=*/false);
        const double ich_distance = metric.distance_to_origin(ich);
        const bool divergent = outcome.classification.divergent();

        lim = update_lim(lim, outcome.classification, ich_distance);
        if (divergent) {
            last_divergent_iter = iter;
            last_divergent_closest = outcome.closest;
            last_divergent_closest_distance = outcome.closest_distance;
        }

        TrajectoryRecord record;
        record.id = iter;
        record.cells = outcome.cells;
        record.classification = outcome.classification;
        record.ich = ich;
        record.ich_distance = ich_distance;
        register_record(registry, std::move(record));

        result.total_steps += outcome.steps;
        ++result.n_trajectories;
        result.lim_history.push_back(clamp());

        IterationSummary summary;
        summary.index = iter;
        summary.strategy = strategy;
        summary.ich = ich;
        summary.ich_distance = ich_distance;
        summary.classification = outcome.classification;
        summary.lim_after = clamp();
        summary.steps = outcome.steps;
        result.iterations.push_back(std::move(summary));

        switch (phase) {
            case Phase::RandomUniform:
                if (divergent) begin_bisect(ich);
                break;
            case Phase::Bisect:
                if (divergent) {
                    bisect_hi = bisect_frac;
                } else {
                    bisect_lo = bisect_frac;
                }
                if (--bisect_left <= 0) phase = Phase::Closest;
                break;
            case Phase::Closest:
                if (divergent) {
                    begin_bisect(ich);
                } else {
                    phase = Phase::RandomBoundary;
                }
                break;
            case Phase::RandomBoundary:
                if (divergent) begin_bisect(ich);
                break;
        }
    }

    result.lim = result.lim_history.back();
    result.status = std::isfinite(lim) ? RunStatus::Ok : RunStatus::BoundaryLimited;
    for (const CellId cell : registry.fixed_point_cells()) {
        result.attractors.push_back(grid.cell_center(cell));
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

}  // namespace delaylim

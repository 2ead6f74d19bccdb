#include "delaylim/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

namespace delaylim {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string fmt9(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double round9(double v) {
    return std::strtod(fmt9(v).c_str(), nullptr);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

struct ParamSpec {
    std::vector<std::string> names;
    bool accepts_spindle_speed = false;
};

ParamSpec param_spec(const std::string& system) {
    if (system == "duffing") return {{"a", "zeta", "tau"}, false};
    if (system == "turning1") return {{"zeta1", "p", "eta2", "eta3", "tau"}, true};
    if (system == "turning2")
        return {{"zeta1", "p", "eta2", "eta3", "tau", "mu", "gamma", "zeta2", "alpha3"}, true};
    if (system == "pendulum") return {{"mu", "gamma", "zeta2", "p", "d", "tau"}, false};
    throw ConfigError("unknown system '" + system +
                      "' (expected duffing|turning1|turning2|pendulum)");
}

void check_param_names(const std::string& system,
                       const std::map<std::string, double>& overrides) {
    const ParamSpec spec = param_spec(system);
    for (const auto& [key, value] : overrides) {
        (void)value;
        if (key == "Omega" && spec.accepts_spindle_speed) continue;
        if (std::find(spec.names.begin(), spec.names.end(), key) != spec.names.end()) continue;
        std::string valid;
        for (const auto& n : spec.names) valid += (valid.empty() ? "" : ", ") + n;
        if (spec.accepts_spindle_speed) valid += ", Omega";
        throw ConfigError("system '" + system + "' has no parameter '" + key +
                          "' (valid: " + valid + ")");
    }
    if (overrides.count("Omega") && overrides.count("tau")) {
        throw ConfigError("give either tau or Omega, not both");
    }
}

double get(const std::map<std::string, double>& m, const std::string& key, double fallback) {
    const auto it = m.find(key);
    return it == m.end() ? fallback : it->second;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 1));
}

std::vector<std::string> system_parameter_names(const std::string& name) {
    ParamSpec spec = param_spec(name);
    if (spec.accepts_spindle_speed) spec.names.push_back("Omega");
    return spec.names;
}

std::shared_ptr<const DdeSystem> make_system(const std::string& name,
                                             const std::map<std::string, double>& overrides) {
    check_param_names(name, overrides);
    std::map<std::string, double> ov = overrides;
    if (const auto it = ov.find("Omega"); it != ov.end()) {
        if (!(it->second > 0.0)) throw ConfigError("Omega must be positive");
        ov["tau"] = 2.0 * M_PI / it->second;
        ov.erase("Omega");
    }

    if (name == "duffing") {
        DuffingParams p;
        p.a = get(ov, "a", p.a);
        p.zeta = get(ov, "zeta", p.zeta);
        p.tau = get(ov, "tau", p.tau);
        return std::make_shared<const DdeSystem>(duffing(p));
    }
    if (name == "turning1") {
        Turning1Params p;
        p.zeta1 = get(ov, "zeta1", p.zeta1);
        p.p = get(ov, "p", p.p);
        p.eta2 = get(ov, "eta2", p.eta2);
        p.eta3 = get(ov, "eta3", p.eta3);
        p.tau = get(ov, "tau", p.tau);
        return std::make_shared<const DdeSystem>(turning_1dof(p));
    }
    if (name == "turning2") {
        Turning2Params p;
        p.zeta1 = get(ov, "zeta1", p.zeta1);
        p.p = get(ov, "p", p.p);
        p.eta2 = get(ov, "eta2", p.eta2);
        p.eta3 = get(ov, "eta3", p.eta3);
        p.tau = get(ov, "tau", p.tau);
        p.mu = get(ov, "mu", p.mu);
        p.gamma = get(ov, "gamma", p.gamma);
        p.zeta2 = get(ov, "zeta2", p.zeta2);
        p.alpha3 = get(ov, "alpha3", p.alpha3);
        return std::make_shared<const DdeSystem>(turning_2dof(p));
    }
    if (name == "pendulum") {
        PendulumParams p;
        p.mu = get(ov, "mu", p.mu);
        p.gamma = get(ov, "gamma", p.gamma);
        p.zeta2 = get(ov, "zeta2", p.zeta2);
        p.p = get(ov, "p", p.p);
        p.d = get(ov, "d", p.d);
        p.tau = get(ov, "tau", p.tau);
        return std::make_shared<const DdeSystem>(pendulum_nltva(p));
    }
    throw ConfigError("unknown system '" + name + "'");
}

void default_bounds(const std::string& name, std::vector<double>& lower,
                    std::vector<double>& upper) {
    double extent = 5.0;
    int dim = 2;
    if (name == "turning1") {
        extent = 2.0;
    } else if (name == "turning2") {
        extent = 2.0;
        dim = 4;
    } else if (name == "pendulum") {
        extent = 2.0;
        dim = 4;
    } else if (name != "duffing") {
        param_spec(name);  // throws for unknown systems
    }
    lower.assign(dim, -extent);
    upper.assign(dim, extent);
}

namespace {

LimRunResult run_point(const RunConfig& cfg, const std::map<std::string, double>& params,
                       std::uint64_t seed) {
    auto system = make_system(cfg.system, params);
    const int dim = system->dimension();

    SemiDiscMap map = build_map(system, cfg.r);

    Vector weights;
    if (!cfg.weights.empty()) {
        if (static_cast<int>(cfg.weights.size()) != dim) {
            throw ConfigError("weights must have " + std::to_string(dim) + " entries");
        }
        weights = Eigen::Map<const Vector>(cfg.weights.data(), dim);
    } else {
        if (!system->modes) {
            throw ConfigError("system '" + cfg.system +
                              "' has no vibration modes; energy-based default weights are "
                              "undefined, supply --weights");
        }
        weights = default_weights(*system->modes);
    }
    MetricSpace metric(weights, system->modes, system->equilibrium);

    std::vector<double> lo = cfg.lower, up = cfg.upper;
    if (lo.empty() || up.empty()) default_bounds(cfg.system, lo, up);
    if (lo.size() == 1 && dim > 1) lo.assign(dim, lo[0]);
    if (up.size() == 1 && dim > 1) up.assign(dim, up[0]);
    if (static_cast<int>(lo.size()) != dim || static_cast<int>(up.size()) != dim) {
        throw ConfigError("bounds must have 1 or " + std::to_string(dim) + " entries per side");
    }
    CellGrid grid(Eigen::Map<const Vector>(lo.data(), dim), Eigen::Map<const Vector>(up.data(), dim),
                  cfg.n_disc);

    EstimatorConfig est;
    est.n_iter = cfg.n_iter;
    est.bisection_steps = cfg.bisection_steps;
    est.seed = seed;
    est.init_kind = cfg.init;
    est.classifier.dwell_factor = cfg.dwell_factor;
    est.classifier.ghost_factor = cfg.ghost_factor;
    est.classifier.neighborhood_radius = cfg.neighborhood_radius;
    est.classifier.n_tau = cfg.n_tau;
    est.classifier.k_rep = cfg.k_rep;
    est.classifier.m_match = cfg.m_match;
    est.classifier.t_max = cfg.t_max;
    est.classifier.reuse = cfg.reuse;

    return estimate_lim(system, map, metric, grid, est);
}

SweepRow row_from_result(const LimRunResult& res) {
    SweepRow row;
    row.lim = res.lim;
    row.status = to_string(res.status);
    row.n_traj = res.n_trajectories;
    row.n_steps = res.total_steps;
    row.wall_s = res.wall_seconds;
    row.boundary_radius = res.boundary_radius;
    row.lim_history = res.lim_history;
    for (const auto& a : res.attractors) {
        row.attractors.emplace_back(a.data(), a.data() + a.size());
    }
    return row;
}

void validate_axes(const RunConfig& cfg) {
    if (cfg.axes.size() > 2) throw ConfigError("at most two sweep axes are supported");
    const ParamSpec spec = param_spec(cfg.system);
    for (const auto& axis : cfg.axes) {
        if (axis.count < 1) throw ConfigError("sweep axis count must be >= 1");
        if (axis.name == "Omega" && spec.accepts_spindle_speed) continue;
        if (std::find(spec.names.begin(), spec.names.end(), axis.name) == spec.names.end()) {
            throw ConfigError("system '" + cfg.system + "' has no parameter '" + axis.name + "'");
        }
    }
}

double axis_value(const SweepAxis& axis, int i) {
    if (axis.count == 1) return axis.min;
    return axis.min + (axis.max - axis.min) * static_cast<double>(i) /
                          static_cast<double>(axis.count - 1);
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed while writing '" + path + "'");
}

}  // namespace

LimRunResult run_single(const RunConfig& config) {
    if (!config.axes.empty()) {
        throw ConfigError("run_single takes no sweep axes; use run_sweep");
    }
    const LimRunResult result = run_point(config, config.params, config.seed);
    if (!config.out.empty()) {
        SweepResult table;
        table.config = config;
        SweepRow row = row_from_result(result);
        row.seed = config.seed;
        table.rows.push_back(std::move(row));
        emit(table, config.out);
    }
    return result;
}

SweepResult run_sweep(const RunConfig& config) {
    if (config.axes.empty()) throw ConfigError("run_sweep needs at least one sweep axis");
    validate_axes(config);
    // Validate the non-swept part of the configuration up front.
    check_param_names(config.system, config.params);

    const int n0 = config.axes[0].count;
    const int n1 = config.axes.size() > 1 ? config.axes[1].count : 1;
    const int total = n0 * n1;

    SweepResult result;
    result.config = config;
    result.rows.resize(total);

    std::atomic<int> next{0};
    const auto worker = [&] {
        for (;;) {
            const int flat = next.fetch_add(1);
            if (flat >= total) return;
            const int i0 = flat / n1;
            const int i1 = flat % n1;

            std::map<std::string, double> params = config.params;
            std::vector<std::pair<std::string, double>> values;
            values.emplace_back(config.axes[0].name, axis_value(config.axes[0], i0));
            if (config.axes.size() > 1) {
                values.emplace_back(config.axes[1].name, axis_value(config.axes[1], i1));
            }
            for (const auto& [name, value] : values) params[name] = value;

            const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(flat));
            SweepRow row;
            row.values = values;
            row.seed = seed;
            try {
                row = row_from_result(run_point(config, params, seed));
                row.values = std::move(values);
                row.seed = seed;
            } catch (const std::exception& e) {
                row.status = std::string("error: ") + e.what();
            }
            result.rows[flat] = std::move(row);
        }
    };

    const int jobs = std::clamp(config.jobs, 1, 64);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (!config.out.empty()) emit(result, config.out);
    return result;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::string csv;
    for (const auto& axis : result.config.axes) csv += axis.name + ",";
    csv += "lim,status,n_traj,n_steps,wall_s\n";
    for (const auto& row : result.rows) {
        for (const auto& [name, value] : row.values) {
            (void)name;
            csv += fmt9(value) + ",";
        }
        // error rows without values still need their axis columns
        for (std::size_t k = row.values.size(); k < result.config.axes.size(); ++k) csv += ",";
        csv += fmt9(row.lim) + "," + row.status + "," + std::to_string(row.n_traj) + "," +
               std::to_string(row.n_steps) + "," + fmt9(row.wall_s) + "\n";
    }
    return csv;
}

std::string config_to_json(const RunConfig& c) {
    ordered_json j;
    j["system"] = c.system;
    j["params"] = ordered_json::object();
    for (const auto& [k, v] : c.params) j["params"][k] = round9(v);
    j["sweep"] = ordered_json::array();
    for (const auto& axis : c.axes) {
        j["sweep"].push_back({{"name", axis.name},
                              {"min", round9(axis.min)},
                              {"max", round9(axis.max)},
                              {"count", axis.count}});
    }
    j["lower"] = c.lower;
    j["upper"] = c.upper;
    j["n_disc"] = c.n_disc;
    j["r"] = c.r;
    j["n_iter"] = c.n_iter;
    j["t_max"] = round9(c.t_max);
    j["bisection_steps"] = c.bisection_steps;
    j["init"] = to_string(c.init);
    j["weights"] = c.weights;
    j["dwell_factor"] = round9(c.dwell_factor);
    j["ghost_factor"] = round9(c.ghost_factor);
    j["neighborhood_radius"] = c.neighborhood_radius;
    j["n_tau"] = c.n_tau;
    j["k_rep"] = c.k_rep;
    j["m_match"] = c.m_match;
    j["reuse"] = c.reuse;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid config JSON: ") + e.what());
    }
    if (j.contains("config")) j = j["config"];  // accept whole result files
    RunConfig c;
    c.system = j.value("system", c.system);
    if (j.contains("params")) {
        for (const auto& [k, v] : j["params"].items()) c.params[k] = v.get<double>();
    }
    if (j.contains("sweep")) {
        for (const auto& a : j["sweep"]) {
            c.axes.push_back({a.at("name").get<std::string>(), a.at("min").get<double>(),
                              a.at("max").get<double>(), a.at("count").get<int>()});
        }
    }
    c.lower = j.value("lower", c.lower);
    c.upper = j.value("upper", c.upper);
    c.n_disc = j.value("n_disc", c.n_disc);
    c.r = j.value("r", c.r);
    c.n_iter = j.value("n_iter", c.n_iter);
    c.t_max = j.value("t_max", c.t_max);
    c.bisection_steps = j.value("bisection_steps", c.bisection_steps);
    if (j.contains("init")) c.init = initial_kind_from_string(j["init"].get<std::string>());
    c.weights = j.value("weights", c.weights);
    c.dwell_factor = j.value("dwell_factor", c.dwell_factor);
    c.ghost_factor = j.value("ghost_factor", c.ghost_factor);
    c.neighborhood_radius = j.value("neighborhood_radius", c.neighborhood_radius);
    c.n_tau = j.value("n_tau", c.n_tau);
    c.k_rep = j.value("k_rep", c.k_rep);
    c.m_match = j.value("m_match", c.m_match);
    c.reuse = j.value("reuse", c.reuse);
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
    return c;
}

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string sweep_to_json(const SweepResult& result) {
    ordered_json j;
    j["config"] = ordered_json::parse(config_to_json(result.config));
    j["rows"] = ordered_json::array();
    for (const auto& row : result.rows) {
        ordered_json r;
        r["values"] = ordered_json::object();
        for (const auto& [name, value] : row.values) r["values"][name] = round9(value);
        r["seed"] = row.seed;
        r["lim"] = round9(row.lim);
        r["status"] = row.status;
        r["n_traj"] = row.n_traj;
        r["n_steps"] = row.n_steps;
        r["boundary_radius"] = round9(row.boundary_radius);
        r["lim_history"] = ordered_json::array();
        for (const double v : row.lim_history) r["lim_history"].push_back(round9(v));
        r["attractors"] = ordered_json::array();
        for (const auto& a : row.attractors) {
            ordered_json point = ordered_json::array();
            for (const double v : a) point.push_back(round9(v));
            r["attractors"].push_back(std::move(point));
        }
        r["wall_s"] = round9(row.wall_s);
        j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
}

void emit(const SweepResult& result, const std::string& prefix) {
    if (prefix.empty()) throw IoError("emit: empty output prefix");
    write_file(prefix + ".csv", sweep_to_csv(result));
    write_file(prefix + ".json", sweep_to_json(result));
}

}  // namespace delaylim

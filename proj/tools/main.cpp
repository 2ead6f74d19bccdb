#include "delaylim/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::vector<double> parse_number_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string token = text.substr(pos, end - pos);
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw delaylim::ConfigError(std::string(what) + ": cannot parse number '" + token + "'");
        }
        pos = end + 1;
    }
    return values;
}

void apply_bounds(delaylim::RunConfig& cfg, const std::string& text) {
    // "lo:hi" for every direction, or "lo1:hi1,lo2:hi2,..." per direction
    cfg.lower.clear();
    cfg.upper.clear();
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        const std::string pair = text.substr(pos, end - pos);
        const std::size_t colon = pair.find(':');
        if (colon == std::string::npos) {
            throw delaylim::ConfigError("--bounds expects lo:hi pairs, got '" + pair + "'");
        }
        const auto lo = parse_number_list(pair.substr(0, colon), "--bounds");
        const auto hi = parse_number_list(pair.substr(colon + 1), "--bounds");
        if (lo.size() != 1 || hi.size() != 1) {
            throw delaylim::ConfigError("--bounds expects lo:hi pairs, got '" + pair + "'");
        }
        cfg.lower.push_back(lo[0]);
        cfg.upper.push_back(hi[0]);
        pos = end + 1;
    }
}

void apply_params(delaylim::RunConfig& cfg, const std::vector<std::string>& params) {
    for (const auto& item : params) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) {
            throw delaylim::ConfigError("--param expects name=value, got '" + item + "'");
        }
        const auto value = parse_number_list(item.substr(eq + 1), "--param");
        if (value.size() != 1) {
            throw delaylim::ConfigError("--param expects name=value, got '" + item + "'");
        }
        cfg.params[item.substr(0, eq)] = value[0];
    }
}

void apply_sweeps(delaylim::RunConfig& cfg, const std::vector<std::string>& sweeps) {
    for (const auto& item : sweeps) {
        delaylim::SweepAxis axis;
        std::size_t pos = 0;
        std::vector<std::string> parts;
        while (pos <= item.size()) {
            std::size_t end = item.find(':', pos);
            if (end == std::string::npos) end = item.size();
            parts.push_back(item.substr(pos, end - pos));
            pos = end + 1;
        }
        if (parts.size() != 4) {
            throw delaylim::ConfigError("--sweep expects name:min:max:count, got '" + item + "'");
        }
        axis.name = parts[0];
        axis.min = parse_number_list(parts[1], "--sweep")[0];
        axis.max = parse_number_list(parts[2], "--sweep")[0];
        axis.count = static_cast<int>(std::stol(parts[3]));
        cfg.axes.push_back(axis);
    }
}

std::string default_out(const std::string& stem) {
    if (const char* dir = std::getenv("DELAYLIM_OUT"); dir && *dir) {
        return std::string(dir) + "/" + stem;
    }
    return stem;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"delaylim - local integrity measure estimation for time-delayed systems"};
    app.require_subcommand(1);

    delaylim::RunConfig cfg;
    std::vector<std::string> params, sweeps;
    std::string bounds, init = "freevib", weights, out;

    const auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--system", cfg.system, "duffing|turning1|turning2|pendulum");
        cmd->add_option("--param", params, "parameter override name=value (repeatable)");
        cmd->add_option("--bounds", bounds, "space boundary lo:hi or lo1:hi1,lo2:hi2,...");
        cmd->add_option("--ndisc", cfg.n_disc, "cells per coordinate direction");
        cmd->add_option("--r", cfg.r, "sampling delay number");
        cmd->add_option("--iters", cfg.n_iter, "trajectories per estimation");
        cmd->add_option("--tmax", cfg.t_max, "maximal simulated time per trajectory");
        cmd->add_option("--init", init, "initial function kind: constant|linear|jump|freevib");
        cmd->add_option("--weights", weights, "distance weights w1,w2,... (default: energy based)");
        cmd->add_option("--bisect", cfg.bisection_steps, "bisection steps per divergent headpoint");
        cmd->add_option("--dwell-factor", cfg.dwell_factor, "convergence dwell threshold / tau");
        cmd->add_option("--ghost-factor", cfg.ghost_factor, "fixed-point dwell threshold / tau");
        cmd->add_option("--neighborhood", cfg.neighborhood_radius,
                        "convergent neighborhood radius in cells");
        cmd->add_option("--ntau", cfg.n_tau, "stored steps per delay interval");
        cmd->add_option("--krep", cfg.k_rep, "window repetitions for the periodic rule");
        cmd->add_option("--mmatch", cfg.m_match, "reuse window length (0: ntau)");
        cmd->add_flag("--no-reuse", "disable trajectory reuse");
        cmd->add_option("--seed", cfg.seed, "master random seed");
        cmd->add_option("--jobs", cfg.jobs, "parallel estimations (sweep only)");
        cmd->add_option("--out", out, "output path prefix (writes <out>.csv and <out>.json)");
    };

    CLI::App* estimate = app.add_subcommand("estimate", "estimate the LIM for one parameter set");
    add_common(estimate);
    CLI::App* sweep = app.add_subcommand("sweep", "estimate the LIM over a parameter grid");
    add_common(sweep);
    sweep->add_option("--sweep", sweeps, "sweep axis name:min:max:count (up to two)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        apply_params(cfg, params);
        apply_sweeps(cfg, sweeps);
        if (!bounds.empty()) apply_bounds(cfg, bounds);
        cfg.init = delaylim::initial_kind_from_string(init);
        if (!weights.empty() && weights != "default") {
            cfg.weights = parse_number_list(weights, "--weights");
        }
        if (estimate->parsed() && estimate->count("--no-reuse")) cfg.reuse = false;
        if (sweep->parsed() && sweep->count("--no-reuse")) cfg.reuse = false;

        if (estimate->parsed()) {
            cfg.out = out.empty() ? default_out("estimate") : out;
            const delaylim::LimRunResult result = delaylim::run_single(cfg);
            std::printf("system=%s status=%s lim=%.9g trajectories=%d steps=%ld wall=%.3fs\n",
                        cfg.system.c_str(), delaylim::to_string(result.status), result.lim,
                        result.n_trajectories, result.total_steps, result.wall_seconds);
            std::printf("wrote %s.csv and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
        } else {
            cfg.out = out.empty() ? default_out("sweep") : out;
            const delaylim::SweepResult result = delaylim::run_sweep(cfg);
            for (const auto& row : result.rows) {
                std::string values;
                for (const auto& [name, value] : row.values) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "%s%s=%.9g", values.empty() ? "" : " ",
                                  name.c_str(), value);
                    values += buf;
                }
                std::printf("%s lim=%.9g status=%s\n", values.c_str(), row.lim, row.status.c_str());
            }
            std::printf("wrote %s.csv and %s.json\n", cfg.out.c_str(), cfg.out.c_str());
        }
    } catch (const delaylim::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const delaylim::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitOk;
}

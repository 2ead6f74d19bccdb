#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "delaylim/classify.hpp"
#include "delaylim/estimator.hpp"
#include "delaylim/initial.hpp"
#include "delaylim/metric.hpp"
#include "delaylim/numerics.hpp"
#include "delaylim/runner.hpp"
#include "delaylim/semidisc.hpp"
#include "delaylim/system.hpp"

namespace py = pybind11;
using namespace delaylim;

namespace {

std::shared_ptr<const DdeSystem> system_from_name(const std::string& name,
                                                  const std::map<std::string, double>& params) {
    return make_system(name, params);
}

std::shared_ptr<const DdeSystem> custom_system(Matrix a, Matrix b, double tau,
                                               const py::function& g, Vector equilibrium,
                                               std::optional<ModeSet> modes,
                                               const std::string& name) {
    auto sys = std::make_shared<DdeSystem>();
    sys->name = name;
    sys->A = std::move(a);
    sys->B = std::move(b);
    sys->tau = tau;
    sys->equilibrium = std::move(equilibrium);
    sys->modes = std::move(modes);
    sys->nonlinearity = [g](const Vector& now, const Vector& delayed, Vector& out) {
        out = g(now, delayed).cast<Vector>();
    };
    return sys;
}

py::dict result_to_dict(const LimRunResult& res) {
    py::dict d;
    d["lim"] = res.lim;
    d["lim_history"] = res.lim_history;
    d["status"] = std::string(to_string(res.status));
    d["boundary_radius"] = res.boundary_radius;
    d["n_trajectories"] = res.n_trajectories;
    d["total_steps"] = res.total_steps;
    py::list attractors;
    for (const auto& a : res.attractors) attractors.append(a);
    d["attractors"] = attractors;
    d["wall_seconds"] = res.wall_seconds;
    py::list iterations;
    for (const auto& it : res.iterations) {
        py::dict row;
        row["index"] = it.index;
        row["strategy"] = it.strategy;
        row["ich"] = it.ich;
        row["ich_distance"] = it.ich_distance;
        row["outcome"] = std::string(to_string(it.classification.outcome));
        row["divergent"] = it.classification.divergent();
        row["lim_after"] = it.lim_after;
        row["steps"] = it.steps;
        iterations.append(row);
    }
    d["iterations"] = iterations;
    return d;
}

RunConfig config_from_kwargs(const py::kwargs& kwargs) {
    RunConfig cfg;
    for (const auto& item : kwargs) {
        const auto key = item.first.cast<std::string>();
        if (key == "system") cfg.system = item.second.cast<std::string>();
        else if (key == "params") cfg.params = item.second.cast<std::map<std::string, double>>();
        else if (key == "sweep") {
            for (const auto& axis : item.second.cast<py::list>()) {
                const auto t = axis.cast<py::tuple>();
                cfg.axes.push_back({t[0].cast<std::string>(), t[1].cast<double>(),
                                    t[2].cast<double>(), t[3].cast<int>()});
            }
        }
        else if (key == "lower") cfg.lower = item.second.cast<std::vector<double>>();
        else if (key == "upper") cfg.upper = item.second.cast<std::vector<double>>();
        else if (key == "n_disc") cfg.n_disc = item.second.cast<int>();
        else if (key == "r") cfg.r = item.second.cast<int>();
        else if (key == "n_iter") cfg.n_iter = item.second.cast<int>();
        else if (key == "t_max") cfg.t_max = item.second.cast<double>();
        else if (key == "bisection_steps") cfg.bisection_steps = item.second.cast<int>();
        else if (key == "init") cfg.init = initial_kind_from_string(item.second.cast<std::string>());
        else if (key == "weights") cfg.weights = item.second.cast<std::vector<double>>();
        else if (key == "dwell_factor") cfg.dwell_factor = item.second.cast<double>();
        else if (key == "ghost_factor") cfg.ghost_factor = item.second.cast<double>();
        else if (key == "neighborhood_radius") cfg.neighborhood_radius = item.second.cast<int>();
        else if (key == "n_tau") cfg.n_tau = item.second.cast<int>();
        else if (key == "k_rep") cfg.k_rep = item.second.cast<int>();
        else if (key == "m_match") cfg.m_match = item.second.cast<int>();
        else if (key == "reuse") cfg.reuse = item.second.cast<bool>();
        else if (key == "seed") cfg.seed = item.second.cast<std::uint64_t>();
        else if (key == "jobs") cfg.jobs = item.second.cast<int>();
        else if (key == "out") cfg.out = item.second.cast<std::string>();
        else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Local integrity measure estimation for time-delayed dynamical systems";

    py::register_exception<Error>(m, "DelaylimError", PyExc_RuntimeError);

    py::class_<ModeSet>(m, "ModeSet")
        .def(py::init([](Vector frequencies, Matrix shapes, Matrix inverse_shapes) {
                 ModeSet ms;
                 ms.frequencies = std::move(frequencies);
                 ms.shapes = std::move(shapes);
                 ms.inverse_shapes = std::move(inverse_shapes);
                 return ms;
             }),
             py::arg("frequencies"), py::arg("shapes"), py::arg("inverse_shapes"))
        .def_readonly("frequencies", &ModeSet::frequencies)
        .def_readonly("shapes", &ModeSet::shapes)
        .def_readonly("inverse_shapes", &ModeSet::inverse_shapes)
        .def("dof", &ModeSet::dof);

    m.def("matrix_exponential", &matrix_exponential, py::arg("a"), py::arg("h"),
          "e^{A h} by scaling-and-squaring with a degree-13 Pade approximant");
    m.def("exp_integral", &exp_integral, py::arg("a"), py::arg("h"),
          "Integral of e^{A(h-s)} over one step; valid for singular A");
    m.def("undamped_modes", &undamped_modes, py::arg("mass"), py::arg("stiffness"),
          "Natural frequencies and mass-normalized shapes of M q'' + K q = 0");

    py::class_<DdeSystem, std::shared_ptr<DdeSystem>>(m, "DdeSystem")
        .def_property_readonly("name", [](const DdeSystem& s) { return s.name; })
        .def_property_readonly("A", [](const DdeSystem& s) { return s.A; })
        .def_property_readonly("B", [](const DdeSystem& s) { return s.B; })
        .def_property_readonly("tau", [](const DdeSystem& s) { return s.tau; })
        .def_property_readonly("equilibrium", [](const DdeSystem& s) { return s.equilibrium; })
        .def_property_readonly("modes",
                               [](const DdeSystem& s) { return s.modes; })
        .def("dimension", &DdeSystem::dimension)
        .def("g", &DdeSystem::g, py::arg("now"), py::arg("delayed"))
        .def("rhs", &DdeSystem::rhs, py::arg("now"), py::arg("delayed"));

    m.def(
        "system",
        [](const std::string& name, const py::kwargs& kwargs) {
            std::map<std::string, double> params;
            for (const auto& item : kwargs) {
                params[item.first.cast<std::string>()] = item.second.cast<double>();
            }
            return std::const_pointer_cast<DdeSystem>(system_from_name(name, params));
        },
        py::arg("name"), "Built-in system by name: duffing|turning1|turning2|pendulum");
    m.def("custom_system", &custom_system, py::arg("A"), py::arg("B"), py::arg("tau"),
          py::arg("g"), py::arg("equilibrium"), py::arg("modes") = std::nullopt,
          py::arg("name") = "custom",
          "User-defined first-order DDE; g(now, delayed) returns the nonlinear remainder");

    py::class_<SemiDiscMap>(m, "SemiDiscMap")
        .def_readonly("P", &SemiDiscMap::P)
        .def_readonly("Q", &SemiDiscMap::Q)
        .def_readonly("QB", &SemiDiscMap::QB)
        .def_readonly("r", &SemiDiscMap::r)
        .def_readonly("h", &SemiDiscMap::h);

    m.def(
        "build_map",
        [](const std::shared_ptr<DdeSystem>& system, int r) {
            return build_map(std::shared_ptr<const DdeSystem>(system), r);
        },
        py::arg("system"), py::arg("r"));

    m.def(
        "build_initial_history",
        [](const std::string& kind, const Vector& headpoint, const SemiDiscMap& map) {
            const InitialHistory h = build_initial_history(initial_kind_from_string(kind),
                                                           headpoint, map);
            py::list samples;
            for (const auto& s : h.samples) samples.append(s);
            return samples;
        },
        py::arg("kind"), py::arg("headpoint"), py::arg("map"),
        "Sampled initial history on [-tau, 0], oldest sample first");

    m.def(
        "simulate",
        [](const SemiDiscMap& map, const std::string& kind, const Vector& headpoint,
           double t_end) {
            const InitialHistory hist =
                build_initial_history(initial_kind_from_string(kind), headpoint, map);
            const SampledTrajectory traj =
                simulate(map, hist, [t_end](double t, const Vector&) { return t < t_end; });
            Matrix states(traj.states.size(), map.system->dimension());
            Vector times(traj.times.size());
            for (std::size_t i = 0; i < traj.states.size(); ++i) {
                states.row(i) = traj.states[i];
                times(i) = traj.times[i];
            }
            return py::make_tuple(times, states, traj.nonfinite);
        },
        py::arg("map"), py::arg("init"), py::arg("headpoint"), py::arg("t_end"),
        "Simulates until t_end; returns (times, states, nonfinite)");

    m.def("default_weights", &default_weights, py::arg("modes"));

    py::class_<MetricSpace>(m, "MetricSpace")
        .def(py::init<Vector, std::optional<ModeSet>, Vector>(), py::arg("weights"),
             py::arg("modes"), py::arg("origin"))
        .def("distance", &MetricSpace::distance, py::arg("a"), py::arg("b"))
        .def("distance_to_origin", &MetricSpace::distance_to_origin, py::arg("y"))
        .def("modal_energy_coordinates", &MetricSpace::modal_energy_coordinates, py::arg("y"))
        .def("dimension", &MetricSpace::dimension);

    m.def(
        "metric_for",
        [](const std::shared_ptr<DdeSystem>& system, std::optional<std::vector<double>> weights) {
            Vector w;
            if (weights) {
                w = Eigen::Map<const Vector>(weights->data(),
                                             static_cast<Eigen::Index>(weights->size()));
            } else {
                if (!system->modes) {
                    throw ConfigError("system has no modes; explicit weights are required");
                }
                w = default_weights(*system->modes);
            }
            return MetricSpace(w, system->modes, system->equilibrium);
        },
        py::arg("system"), py::arg("weights") = std::nullopt,
        "Metric about the system equilibrium with energy-based or explicit weights");

    m.def(
        "estimate",
        [](const py::kwargs& kwargs) { return result_to_dict(run_single(config_from_kwargs(kwargs))); },
        "Single LIM estimation; accepts the RunConfig fields as keyword arguments");

    m.def(
        "sweep",
        [](const py::kwargs& kwargs) {
            const SweepResult res = run_sweep(config_from_kwargs(kwargs));
            py::list rows;
            for (const auto& row : res.rows) {
                py::dict d;
                py::dict values;
                for (const auto& [name, value] : row.values) values[py::str(name)] = value;
                d["values"] = values;
                d["seed"] = row.seed;
                d["lim"] = row.lim;
                d["status"] = row.status;
                d["n_traj"] = row.n_traj;
                d["n_steps"] = row.n_steps;
                d["lim_history"] = row.lim_history;
                d["attractors"] = row.attractors;
                rows.append(d);
            }
            return rows;
        },
        "Parameter sweep; accepts the RunConfig fields as keyword arguments");

    m.attr("__version__") = "0.1.0";
}

#include "reference_dde.hpp"

#include <cmath>

namespace delaylim::testing {

Vector ReferenceSolution::at(double t) const {
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    const double x = t / dt;
    const std::size_t i = static_cast<std::size_t>(x);
    const double frac = x - static_cast<double>(i);
    return states[i] * (1.0 - frac) + states[i + 1] * frac;
}

ReferenceSolution reference_solve(const DdeSystem& system,
                                  const std::function<Vector(double)>& history, double t_end,
                                  double dt_request) {
    const double tau = system.tau;
    const int per_tau = std::max(1, static_cast<int>(std::round(tau / dt_request)));
    const double dt = tau / per_tau;

    ReferenceSolution sol;
    sol.dt = dt;
    const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
    sol.times.reserve(n_steps + 1);
    sol.states.reserve(n_steps + 1);
    sol.times.push_back(0.0);
    sol.states.push_back(history(0.0));

    const auto delayed_at = [&](double t) -> Vector {
        const double s = t - tau;
        if (s <= 0.0) return history(s);
        const double x = s / dt;
        const std::size_t i = static_cast<std::size_t>(x);
        const double frac = x - static_cast<double>(i);
        if (i + 1 >= sol.states.size()) return sol.states.back();
        return sol.states[i] * (1.0 - frac) + sol.states[i + 1] * frac;
    };
    const auto f = [&](double t, const Vector& y) -> Vector {
        const Vector yd = delayed_at(t);
        return system.A * y + system.B * yd + system.g(y, yd);
    };

    for (int i = 0; i < n_steps; ++i) {
        const double t = i * dt;
        const Vector& y = sol.states.back();
        const Vector k1 = f(t, y);
        const Vector k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
        const Vector k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
        const Vector k4 = f(t + dt, y + dt * k3);
        sol.states.push_back(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
        sol.times.push_back((i + 1) * dt);
    }
    return sol;
}

std::function<Vector(double)> freevib_history(const DdeSystem& system, const Vector& headpoint) {
    if (!system.modes) {
        throw UnsupportedOperation("freevib_history: system has no vibration modes");
    }
    const ModeSet modes = *system.modes;
    const Vector eq = system.equilibrium;
    const int n = modes.dof();
    const Vector offset = headpoint - eq;
    const Vector q0 = modes.inverse_shapes * offset.head(n);
    const Vector v0 = modes.inverse_shapes * offset.tail(n);
    return [modes, eq, n, q0, v0](double t) -> Vector {
        Vector q(n), v(n);
        for (int i = 0; i < n; ++i) {
            const double w = modes.frequencies(i);
            q(i) = q0(i) * std::cos(w * t) + v0(i) / w * std::sin(w * t);
            v(i) = -q0(i) * w * std::sin(w * t) + v0(i) * std::cos(w * t);
        }
        Vector y(2 * n);
        y.head(n) = modes.shapes * q;
        y.tail(n) = modes.shapes * v;
        return eq + y;
    };
}

}  // namespace delaylim::testing

#pragma once

#include "delaylim/numerics.hpp"

#include <functional>
#include <optional>
#include <string>

namespace delaylim {

/// First-order nonlinear delay differential equation
///
///     y'(t) = A y(t) + B y(t - tau) + g(y(t), y(t - tau)),
///
/// where g holds the strictly super-linear remainder. States are ordered
/// positions first, velocities last.
struct DdeSystem {
    std::string name;
    Matrix A;  ///< non-delayed coefficients
    Matrix B;  ///< delayed coefficients
    /// Nonlinear remainder; writes g(y_now, y_delayed) into `out`.
    std::function<void(const Vector& now, const Vector& delayed, Vector& out)> nonlinearity;
    double tau = 0.0;
    Vector equilibrium;  ///< the desired fixed point
    /// Modes of the undamped, undelayed, force-free linearization about the
    /// desired equilibrium; absent when that linearization has no vibration modes.
    std::optional<ModeSet> modes;

    int dimension() const { return static_cast<int>(A.rows()); }

    Vector g(const Vector& now, const Vector& delayed) const;
    /// Full right-hand side A y + B y_d + g(y, y_d).
    Vector rhs(const Vector& now, const Vector& delayed) const;
};

/// x'' + 2 zeta x' - x(t - tau) + a x^3 = 0; equilibria at 0 and ±1/sqrt(a).
struct DuffingParams {
    double a = 1.0;
    double zeta = 0.1;
    double tau = 0.1;
};

/// Single-DoF turning: x'' + 2 zeta1 x' + x = p (dx + eta2 dx^2 + eta3 dx^3)
/// with dx = x(t - tau) - x(t); tau is the spindle revolution period.
struct Turning1Params {
    double zeta1 = 0.05;
    double p = 0.2;
    double eta2 = -0.5209;
    double eta3 = 0.6547;
    double tau = 9.0;

    /// Dimensionless spindle speed 2 pi / tau.
    double spindle_speed() const { return 2.0 * M_PI / tau; }
};

/// Turning with a nonlinear tuned vibration absorber attached to the tool.
struct Turning2Params : Turning1Params {
    double mu = 0.05;      ///< absorber/tool mass ratio
    double gamma = 1.069;  ///< absorber/tool frequency ratio
    double zeta2 = 0.1437;
    double alpha3 = 0.0;   ///< absorber cubic stiffness
};

/// Inverted pendulum with absorber under delayed PD control of the pendulum angle.
struct PendulumParams {
    double mu = 0.1;
    double gamma = 2.3;
    double zeta2 = 0.174;
    double p = 1.0;  ///< proportional gain
    double d = 2.8;  ///< derivative gain
    double tau = 0.5;
};

DdeSystem duffing(const DuffingParams& params);
DdeSystem turning_1dof(const Turning1Params& params);
DdeSystem turning_2dof(const Turning2Params& params);
DdeSystem pendulum_nltva(const PendulumParams& params);

}  // namespace delaylim

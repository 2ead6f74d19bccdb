#include "delaylim/system.hpp"

#include <cmath>

namespace delaylim {

Vector DdeSystem::g(const Vector& now, const Vector& delayed) const {
    Vector out(dimension());
    nonlinearity(now, delayed, out);
    return out;
}

Vector DdeSystem::rhs(const Vector& now, const Vector& delayed) const {
    Vector out(dimension());
    nonlinearity(now, delayed, out);
    out += A * now + B * delayed;
    return out;
}

namespace {

void require_positive(double value, const char* name, const char* system) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw InvalidParameter(std::string(system) + ": parameter " + name + " must be positive");
    }
}

void require_nonnegative(double value, const char* name, const char* system) {
    if (value < 0.0 || !std::isfinite(value)) {
        throw InvalidParameter(std::string(system) + ": parameter " + name + " must be nonnegative");
    }
}

ModeSet single_mode(double stiffness) {
    Matrix m = Matrix::Identity(1, 1);
    Matrix k(1, 1);
    k(0, 0) = stiffness;
    return undamped_modes(m, k);
}

}  // namespace

DdeSystem duffing(const DuffingParams& params) {
    require_positive(params.a, "a", "duffing");
    require_nonnegative(params.zeta, "zeta", "duffing");
    require_positive(params.tau, "tau", "duffing");

    DdeSystem sys;
    sys.name = "duffing";
    sys.A = Matrix{{0.0, 1.0}, {0.0, -2.0 * params.zeta}};
    sys.B = Matrix{{0.0, 0.0}, {1.0, 0.0}};
    const double a = params.a;
    sys.nonlinearity = [a](const Vector& now, const Vector&, Vector& out) {
        out(0) = 0.0;
        out(1) = -a * now(0) * now(0) * now(0);
    };
    sys.tau = params.tau;
    sys.equilibrium = Vector{{-1.0 / std::sqrt(a), 0.0}};
    // About the desired equilibrium the instantaneous stiffness is
    // 3 a x*^2 - 1 = 2 for every a > 0.
    sys.modes = single_mode(2.0);
    return sys;
}

DdeSystem turning_1dof(const Turning1Params& params) {
    require_positive(params.tau, "tau", "turning1");
    require_nonnegative(params.p, "p", "turning1");
    require_nonnegative(params.zeta1, "zeta1", "turning1");

    DdeSystem sys;
    sys.name = "turning1";
    sys.A = Matrix{{0.0, 1.0}, {-(1.0 + params.p), -2.0 * params.zeta1}};
    sys.B = Matrix{{0.0, 0.0}, {params.p, 0.0}};
    const double p = params.p;
    const double eta2 = params.eta2;
    const double eta3 = params.eta3;
    sys.nonlinearity = [p, eta2, eta3](const Vector& now, const Vector& delayed, Vector& out) {
        const double dx = delayed(0) - now(0);
        out(0) = 0.0;
        out(1) = p * (eta2 * dx * dx + eta3 * dx * dx * dx);
    };
    sys.tau = params.tau;
    sys.equilibrium = Vector::Zero(2);
    // Cutting-force-free oscillator: unit mass, unit stiffness.
    sys.modes = single_mode(1.0);
    return sys;
}

DdeSystem turning_2dof(const Turning2Params& params) {
    require_positive(params.tau, "tau", "turning2");
    require_nonnegative(params.p, "p", "turning2");
    require_positive(params.mu, "mu", "turning2");
    require_positive(params.gamma, "gamma", "turning2");

    const double p = params.p;
    const double z1 = params.zeta1;
    const double z2 = params.zeta2;
    const double mu = params.mu;
    const double ga = params.gamma;
    const double eta2 = params.eta2;
    const double eta3 = params.eta3;
    const double a3 = params.alpha3;

    DdeSystem sys;
    sys.name = "turning2";
    sys.A = Matrix::Zero(4, 4);
    sys.A(0, 2) = 1.0;
    sys.A(1, 3) = 1.0;
    sys.A(2, 0) = -(1.0 + ga * ga * mu + p);
    sys.A(2, 1) = ga * ga * mu;
    sys.A(2, 2) = -2.0 * z1 - 2.0 * z2 * ga * mu;
    sys.A(2, 3) = 2.0 * z2 * ga * mu;
    sys.A(3, 0) = ga * ga;
    sys.A(3, 1) = -ga * ga;
    sys.A(3, 2) = 2.0 * z2 * ga;
    sys.A(3, 3) = -2.0 * z2 * ga;
    sys.B = Matrix::Zero(4, 4);
    sys.B(2, 0) = p;
    sys.nonlinearity = [p, eta2, eta3, a3, mu](const Vector& now, const Vector& delayed, Vector& out) {
        const double dx = delayed(0) - now(0);
        const double rel = now(0) - now(1);
        const double rel3 = rel * rel * rel;
        out(0) = 0.0;
        out(1) = 0.0;
        out(2) = -a3 * rel3 + p * (eta2 * dx * dx + eta3 * dx * dx * dx);
        out(3) = (a3 / mu) * rel3;
    };
    sys.tau = params.tau;
    sys.equilibrium = Vector::Zero(4);

    Matrix mass = Matrix::Zero(2, 2);
    mass(0, 0) = 1.0;
    mass(1, 1) = mu;
    Matrix stiff(2, 2);
    stiff(0, 0) = 1.0 + ga * ga * mu;
    stiff(0, 1) = -ga * ga * mu;
    stiff(1, 0) = -ga * ga * mu;
    stiff(1, 1) = ga * ga * mu;
    sys.modes = undamped_modes(mass, stiff);
    return sys;
}

DdeSystem pendulum_nltva(const PendulumParams& params) {
    require_positive(params.mu, "mu", "pendulum");
    require_positive(params.gamma, "gamma", "pendulum");
    require_positive(params.tau, "tau", "pendulum");

    const double mu = params.mu;
    const double ga = params.gamma;
    const double z2 = params.zeta2;
    const double p = params.p;
    const double d = params.d;

    DdeSystem sys;
    sys.name = "pendulum";
    sys.A = Matrix::Zero(4, 4);
    sys.A(0, 2) = 1.0;
    sys.A(1, 3) = 1.0;
    sys.A(2, 0) = 1.0 - mu * ga * ga;  // gravity linearized at the upright position
    sys.A(2, 1) = mu * ga * ga;
    sys.A(2, 2) = -2.0 * z2 * mu * ga;
    sys.A(2, 3) = 2.0 * z2 * mu * ga;
    sys.A(3, 0) = ga * ga;
    sys.A(3, 1) = -ga * ga;
    sys.A(3, 2) = 2.0 * z2 * ga;
    sys.A(3, 3) = -2.0 * z2 * ga;
    sys.B = Matrix::Zero(4, 4);
    sys.B(2, 0) = -p;
    sys.B(2, 2) = -d;
    sys.nonlinearity = [](const Vector& now, const Vector&, Vector& out) {
        out.setZero();
        out(2) = std::sin(now(0)) - now(0);
    };
    sys.tau = params.tau;
    sys.equilibrium = Vector::Zero(4);
    // The uncontrolled upright equilibrium has an indefinite stiffness matrix,
    // so no vibration modes exist; distance weights must be user supplied.
    sys.modes = std::nullopt;
    return sys;
}

}  // namespace delaylim

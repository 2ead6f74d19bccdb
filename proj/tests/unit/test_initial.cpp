#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "delaylim/initial.hpp"
#include "delaylim/semidisc.hpp"

#include <cmath>

using namespace delaylim;

namespace {

DdeSystem oscillator_with_mode(double omega, Vector equilibrium, double tau) {
    DdeSystem sys;
    sys.name = "osc";
    sys.A = Matrix::Zero(2, 2);
    sys.A(0, 1) = 1.0;
    sys.A(1, 0) = -omega * omega;
    sys.B = Matrix::Zero(2, 2);
    sys.nonlinearity = [](const Vector&, const Vector&, Vector& out) { out.setZero(); };
    sys.tau = tau;
    sys.equilibrium = std::move(equilibrium);
    ModeSet mode;
    mode.frequencies = Vector::Constant(1, omega);
    mode.shapes = Matrix::Identity(1, 1);
    mode.inverse_shapes = Matrix::Identity(1, 1);
    sys.modes = mode;
    return sys;
}

}  // namespace

TEST_CASE("constant history repeats the headpoint") {
    const DdeSystem sys = duffing({});
    Vector head(2);
    head << 0.5, 0.5;
    const InitialHistory hist = build_initial_history(InitialKind::Constant, head, sys, 12,
                                                      sys.tau / 12.5);
    CHECK(hist.samples.size() == 13);
    for (const auto& s : hist.samples) CHECK((s - head).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("jump history rests at the equilibrium until the headpoint") {
    const DdeSystem sys = duffing({});  // equilibrium (-1, 0)
    Vector head(2);
    head << -1.0, 2.0;
    const InitialHistory hist = build_initial_history(InitialKind::Jump, head, sys, 10,
                                                      sys.tau / 10.5);
    for (int k = 0; k < 10; ++k) {
        CHECK((hist.samples[k] - sys.equilibrium).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((hist.samples[10] - head).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear history interpolates equilibrium to headpoint") {
    const DdeSystem sys = duffing({});
    Vector head(2);
    head << 1.0, -0.4;
    const int r = 10;
    const double h = sys.tau / (r + 0.5);
    const InitialHistory hist = build_initial_history(InitialKind::Linear, head, sys, r, h);
    for (int k = 0; k <= r; ++k) {
        const double t = -(r - k) * h;
        const Vector expected = sys.equilibrium + (1.0 + t / sys.tau) * (head - sys.equilibrium);
        CHECK((hist.samples[k] - expected).cwiseAbs().maxCoeff() < 1e-14);
    }
    // the unsampled endpoint of the line is the equilibrium itself
    const Vector at_minus_tau = sys.equilibrium + (1.0 - 1.0) * (head - sys.equilibrium);
    CHECK((at_minus_tau - sys.equilibrium).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("free vibration rotates by a quarter period over pi/2") {
    // unit frequency: an offset (1, 0) becomes (0, 1) a quarter period earlier
    Vector eq(2);
    eq << 0.3, -0.2;
    const DdeSystem sys = oscillator_with_mode(1.0, eq, 1.05 * M_PI);
    Vector head = eq;
    head(0) += 1.0;
    const int r = 10;
    const double h = M_PI / 10.0;  // sample 5 sits at t = -pi/2
    const InitialHistory hist = build_initial_history(InitialKind::FreeVibration, head, sys, r, h);
    const Vector offset = hist.samples[5] - eq;
    CHECK(offset(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(offset(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("every kind ends exactly at the requested headpoint") {
    const DdeSystem sys = duffing({});
    Vector head(2);
    head << 0.7, -1.3;
    for (const auto kind : {InitialKind::Constant, InitialKind::Linear, InitialKind::Jump,
                            InitialKind::FreeVibration}) {
        const InitialHistory hist = build_initial_history(kind, head, sys, 14, sys.tau / 14.5);
        CHECK((hist.samples.back() - head).cwiseAbs().maxCoeff() == 0.0);
        CHECK((hist.headpoint - head).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("free vibration conserves the energy of every mode") {
    auto sys = std::make_shared<const DdeSystem>(turning_2dof({}));
    REQUIRE(sys->modes.has_value());
    const SemiDiscMap map = build_map(sys, 25);
    Vector head(4);
    head << 0.4, -0.3, 0.2, 0.6;
    const InitialHistory hist = build_initial_history(InitialKind::FreeVibration, head, map);

    const ModeSet& modes = *sys->modes;
    const int n = modes.dof();
    std::vector<double> reference_energy(n, -1.0);
    for (const auto& sample : hist.samples) {
        const Vector offset = sample - sys->equilibrium;
        const Vector q = modes.inverse_shapes * offset.head(n);
        const Vector v = modes.inverse_shapes * offset.tail(n);
        for (int i = 0; i < n; ++i) {
            const double w = modes.frequencies(i);
            const double energy = w * w * q(i) * q(i) + v(i) * v(i);
            if (reference_energy[i] < 0.0) reference_energy[i] = energy;
            CHECK(energy == doctest::Approx(reference_energy[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("free vibration needs vibration modes") {
    const DdeSystem sys = pendulum_nltva({});
    CHECK_THROWS_AS(
        build_initial_history(InitialKind::FreeVibration, Vector::Zero(4), sys, 10, 0.05),
        UnsupportedOperation);
}

TEST_CASE("initial history input validation") {
    const DdeSystem sys = duffing({});
    CHECK_THROWS_AS(build_initial_history(InitialKind::Constant, Vector::Zero(3), sys, 10, 0.01),
                    DimensionError);
    Vector bad(2);
    bad << std::nan(""), 0.0;
    CHECK_THROWS_AS(build_initial_history(InitialKind::Constant, bad, sys, 10, 0.01),
                    InvalidInput);
    CHECK_THROWS_AS(build_initial_history(InitialKind::Constant, Vector::Zero(2), sys, 0, 0.01),
                    InvalidParameter);
}

TEST_CASE("kind names round-trip") {
    for (const auto kind : {InitialKind::Constant, InitialKind::Linear, InitialKind::Jump,
                            InitialKind::FreeVibration}) {
        CHECK(initial_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_THROWS_AS(initial_kind_from_string("sawtooth"), InvalidParameter);
}

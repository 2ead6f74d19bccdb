#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "delaylim/numerics.hpp"

#include <cmath>
#include <random>

using namespace delaylim;

namespace {

Matrix random_matrix(std::mt19937& rng, int n, double scale) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) a(i, j) = scale * u(rng);
    }
    return a;
}

}  // namespace

TEST_CASE("matrix exponential of the zero matrix is the identity") {
    const Matrix e = matrix_exponential(Matrix::Zero(2, 2), 1.0);
    CHECK((e - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("matrix exponential of a nilpotent matrix truncates exactly") {
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    const Matrix e = matrix_exponential(a, 0.5);
    CHECK(e(0, 0) == doctest::Approx(1.0));
    CHECK(e(0, 1) == doctest::Approx(0.5));
    CHECK(e(1, 0) == doctest::Approx(0.0));
    CHECK(e(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("matrix exponential of a diagonal matrix") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -2.0;
    a(1, 1) = 3.0;
    const Matrix e = matrix_exponential(a, 0.1);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-0.2)).epsilon(1e-13));
    CHECK(e(1, 1) == doctest::Approx(std::exp(0.3)).epsilon(1e-13));
    CHECK(std::abs(e(0, 1)) < 1e-15);
}

TEST_CASE("matrix exponential stays accurate for large norms") {
    Matrix a = Matrix::Zero(2, 2);
    a(0, 0) = -50.0;
    a(1, 1) = 3.0;
    const Matrix e = matrix_exponential(a, 2.0);  // |A h| = 100
    CHECK(e(0, 0) == doctest::Approx(std::exp(-100.0)).epsilon(1e-12));
    CHECK(e(1, 1) == doctest::Approx(std::exp(6.0)).epsilon(1e-12));
}

TEST_CASE("matrix exponential input validation") {
    CHECK_THROWS_AS(matrix_exponential(Matrix::Zero(2, 3), 1.0), DimensionError);
    Matrix bad = Matrix::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_THROWS_AS(matrix_exponential(bad, 1.0), InvalidInput);
    CHECK_THROWS_AS(matrix_exponential(Matrix::Zero(2, 2), 0.0), InvalidParameter);
    CHECK_THROWS_AS(matrix_exponential(Matrix::Zero(2, 2), -1.0), InvalidParameter);
}

TEST_CASE("semigroup property on random matrices") {
    std::mt19937 rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 1 + rep % 5;
        const Matrix a = random_matrix(rng, n, 2.0);
        std::uniform_real_distribution<double> u(0.05, 1.5);
        const double h1 = u(rng), h2 = u(rng);
        const Matrix lhs = matrix_exponential(a, h1) * matrix_exponential(a, h2);
        const Matrix rhs = matrix_exponential(a, h1 + h2);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("exp integral of the zero matrix") {
    const Matrix q = exp_integral(Matrix::Zero(3, 3), 0.2);
    CHECK((q - 0.2 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exp integral scalar closed form") {
    const Matrix q = exp_integral(Matrix::Constant(1, 1, 1.0), 1.0);
    CHECK(q(0, 0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("exp integral of a nilpotent matrix") {
    Matrix a(2, 2);
    a << 0, 1, 0, 0;
    const Matrix q = exp_integral(a, 1.0);
    CHECK(q(0, 0) == doctest::Approx(1.0));
    CHECK(q(0, 1) == doctest::Approx(0.5));
    CHECK(q(1, 0) == doctest::Approx(0.0));
    CHECK(q(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("A * exp_integral + I equals the exponential, singular cases included") {
    std::mt19937 rng(11);
    for (int rep = 0; rep < 30; ++rep) {
        const int n = 2 + rep % 4;
        Matrix a = random_matrix(rng, n, 1.5);
        if (rep % 3 == 0) a.col(0) = a.col(n - 1);  // make A singular
        if (rep % 3 == 1) a.row(0).setZero();
        const double h = 0.3 + 0.1 * (rep % 7);
        const Matrix p = matrix_exponential(a, h);
        const Matrix q = exp_integral(a, h);
        const Matrix residual = a * q + Matrix::Identity(n, n) - p;
        CHECK(residual.cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, p.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("undamped modes of an already diagonal system") {
    Matrix k = Matrix::Zero(2, 2);
    k(0, 0) = 4.0;
    k(1, 1) = 9.0;
    const ModeSet modes = undamped_modes(Matrix::Identity(2, 2), k);
    CHECK(modes.frequencies(0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(modes.frequencies(1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK((modes.shapes - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("undamped modes of a single oscillator") {
    const ModeSet modes =
        undamped_modes(Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 8.0));
    CHECK(modes.frequencies(0) == doctest::Approx(2.0).epsilon(1e-12));
    // mass normalization: phi^T M phi = 1
    CHECK(modes.shapes(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("undamped modes of the two-mass chain match the hand-solved polynomial") {
    // det(K - l I) = l^2 - 3 l + 1 for K = [[2,-1],[-1,1]], M = I.
    Matrix k(2, 2);
    k << 2, -1, -1, 1;
    const ModeSet modes = undamped_modes(Matrix::Identity(2, 2), k);
    const double l1 = (3.0 - std::sqrt(5.0)) / 2.0;
    const double l2 = (3.0 + std::sqrt(5.0)) / 2.0;
    CHECK(modes.frequencies(0) == doctest::Approx(std::sqrt(l1)).epsilon(1e-12));
    CHECK(modes.frequencies(1) == doctest::Approx(std::sqrt(l2)).epsilon(1e-12));
}

TEST_CASE("mode shapes are mass-normalized and invertible") {
    std::mt19937 rng(23);
    for (int rep = 0; rep < 20; ++rep) {
        const int n = 2 + rep % 3;
        const Matrix r = random_matrix(rng, n, 1.0);
        const Matrix s = random_matrix(rng, n, 1.0);
        const Matrix mass = r * r.transpose() + n * Matrix::Identity(n, n);
        const Matrix stiff = s * s.transpose() + 0.5 * Matrix::Identity(n, n);
        const ModeSet modes = undamped_modes(mass, stiff);

        const Matrix gram = modes.shapes.transpose() * mass * modes.shapes;
        CHECK((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);
        const Matrix prod = modes.shapes * modes.inverse_shapes;
        CHECK((prod - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-10);

        // round trip: shapes diag(w^2) inverse_shapes = M^{-1} K
        const Matrix omega2 = modes.frequencies.array().square().matrix().asDiagonal();
        const Matrix lhs = modes.shapes * omega2 * modes.inverse_shapes;
        const Matrix rhs = mass.partialPivLu().solve(stiff);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));

        for (int i = 0; i + 1 < n; ++i) CHECK(modes.frequencies(i) <= modes.frequencies(i + 1));
    }
}

TEST_CASE("undamped modes reject indefinite stiffness") {
    Matrix k = Matrix::Zero(2, 2);
    k(0, 0) = -1.0;
    k(1, 1) = 2.0;
    CHECK_THROWS_AS(undamped_modes(Matrix::Identity(2, 2), k), NoVibrationModes);
}

TEST_CASE("undamped modes reject asymmetric input") {
    Matrix k(2, 2);
    k << 2, -1, 0, 1;
    CHECK_THROWS_AS(undamped_modes(Matrix::Identity(2, 2), k), InvalidInput);
}

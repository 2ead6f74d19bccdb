#include "delaylim/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace delaylim {

namespace {

void require_square_finite(const Matrix& a, const char* op) {
    if (a.rows() != a.cols()) {
        throw DimensionError(std::string(op) + ": matrix must be square, got " +
                             std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
    }
    if (!a.allFinite()) {
        throw InvalidInput(std::string(op) + ": matrix has non-finite entries");
    }
}

void require_positive_step(double h, const char* op) {
    if (!(h > 0.0) || !std::isfinite(h)) {
        throw InvalidParameter(std::string(op) + ": step must be positive and finite");
    }
}

// Degree-13 diagonal Pade approximant of e^M with scaling and squaring.
Matrix expm_pade13(Matrix m) {
    static constexpr double kTheta13 = 5.371920351148152;
    static constexpr double b[] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};

    const Eigen::Index n = m.rows();
    const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm1 > kTheta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm1 / kTheta13)));
        m *= std::ldexp(1.0, -squarings);
    }

    const Matrix id = Matrix::Identity(n, n);
    const Matrix m2 = m * m;
    const Matrix m4 = m2 * m2;
    const Matrix m6 = m2 * m4;

    const Matrix u = m * (m6 * (b[13] * m6 + b[11] * m4 + b[9] * m2) +
                          b[7] * m6 + b[5] * m4 + b[3] * m2 + b[1] * id);
    const Matrix v = m6 * (b[12] * m6 + b[10] * m4 + b[8] * m2) +
                     b[6] * m6 + b[4] * m4 + b[2] * m2 + b[0] * id;

    Matrix r = (v - u).partialPivLu().solve(v + u);
    for (int i = 0; i < squarings; ++i) {
        r = r * r;
    }
    return r;
}

}  // namespace

Matrix matrix_exponential(const Matrix& a, double h) {
    require_square_finite(a, "matrix_exponential");
    require_positive_step(h, "matrix_exponential");
    return expm_pade13(a * h);
}

Matrix exp_integral(const Matrix& a, double h) {
    require_square_finite(a, "exp_integral");
    require_positive_step(h, "exp_integral");
    const Eigen::Index n = a.rows();
    Matrix aug = Matrix::Zero(2 * n, 2 * n);
    aug.topLeftCorner(n, n) = a;
    aug.topRightCorner(n, n) = Matrix::Identity(n, n);
    return expm_pade13(aug * h).topRightCorner(n, n);
}

ModeSet undamped_modes(const Matrix& mass, const Matrix& stiffness) {
    require_square_finite(mass, "undamped_modes");
    require_square_finite(stiffness, "undamped_modes");
    if (mass.rows() != stiffness.rows()) {
        throw DimensionError("undamped_modes: M and K must have equal size");
    }
    const double m_scale = std::max(1.0, mass.cwiseAbs().maxCoeff());
    const double k_scale = std::max(1.0, stiffness.cwiseAbs().maxCoeff());
    if ((mass - mass.transpose()).cwiseAbs().maxCoeff() > 1e-10 * m_scale ||
        (stiffness - stiffness.transpose()).cwiseAbs().maxCoeff() > 1e-10 * k_scale) {
        throw InvalidInput("undamped_modes: M and K must be symmetric");
    }

    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(
        stiffness, mass, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (solver.info() != Eigen::Success) {
        throw NoVibrationModes("undamped_modes: eigensolver failed (M not positive definite?)");
    }
    const Vector evals = solver.eigenvalues();
    if (!(evals.minCoeff() > 0.0)) {
        throw NoVibrationModes("undamped_modes: no vibration modes (non-positive eigenvalue)");
    }

    ModeSet modes;
    modes.frequencies = evals.cwiseSqrt();
    modes.shapes = solver.eigenvectors();
    // Fix the sign convention: largest-magnitude entry of each shape positive.
    for (Eigen::Index j = 0; j < modes.shapes.cols(); ++j) {
        Eigen::Index imax = 0;
        modes.shapes.col(j).cwiseAbs().maxCoeff(&imax);
        if (modes.shapes(imax, j) < 0.0) {
            modes.shapes.col(j) = -modes.shapes.col(j);
        }
    }
    modes.inverse_shapes = modes.shapes.transpose() * mass;
    return modes;
}

}  // namespace delaylim

#pragma once

#include "delaylim/types.hpp"

namespace delaylim {

/// Natural angular frequencies and mass-normalized mode shapes of an
/// undamped mechanical system M q'' + K q = 0.
struct ModeSet {
    Vector frequencies;     ///< ascending, all > 0
    Matrix shapes;          ///< columns are mode shapes, shapes^T M shapes = I
    Matrix inverse_shapes;  ///< shapes * inverse_shapes = I

    int dof() const { return static_cast<int>(frequencies.size()); }
};

/// e^{A h} by scaling-and-squaring with a degree-13 Pade approximant.
Matrix matrix_exponential(const Matrix& a, double h);

/// ∫_0^h e^{A(h-s)} ds, valid also for singular A (computed through the
/// augmented block exponential of [[A, I], [0, 0]]).
Matrix exp_integral(const Matrix& a, double h);

/// Solves the generalized eigenproblem K φ = ω² M φ.
/// Throws NoVibrationModes when any eigenvalue is non-positive.
ModeSet undamped_modes(const Matrix& mass, const Matrix& stiffness);

}  // namespace delaylim

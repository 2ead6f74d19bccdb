#pragma once

#include "delaylim/system.hpp"

#include <vector>

namespace delaylim {

/// Constrained initial-function families on [-tau, 0].
enum class InitialKind {
    Constant,       ///< every coordinate constant at the headpoint value
    Linear,         ///< linear from the equilibrium at t = -tau to the headpoint
    Jump,           ///< at the equilibrium for t < 0, headpoint at t = 0
    FreeVibration,  ///< undamped modal oscillation about the equilibrium ending at the headpoint
};

const char* to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

/// Sampled initial history: r+1 states at times -r h, ..., -h, 0.
struct InitialHistory {
    std::vector<Vector> samples;  ///< oldest first; samples.back() is the headpoint
    Vector headpoint;
    InitialKind kind = InitialKind::Constant;
    int r = 0;
    double h = 0.0;
};

/// Samples the chosen initial function through the given headpoint.
/// FreeVibration requires system.modes and throws UnsupportedOperation otherwise.
InitialHistory build_initial_history(InitialKind kind, const Vector& headpoint,
                                     const DdeSystem& system, int r, double h);

}  // namespace delaylim

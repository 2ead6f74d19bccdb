#pragma once

#include "delaylim/system.hpp"

#include <memory>

namespace delaylim::testing {

/// y'(t) = -y(t - tau): the classic scalar test equation, asymptotically
/// stable exactly for tau < pi/2.
inline std::shared_ptr<const DdeSystem> scalar_dde(double tau) {
    auto sys = std::make_shared<DdeSystem>();
    sys->name = "scalar";
    sys->A = Matrix::Zero(1, 1);
    sys->B = Matrix::Constant(1, 1, -1.0);
    sys->nonlinearity = [](const Vector&, const Vector&, Vector& out) { out.setZero(); };
    sys->tau = tau;
    sys->equilibrium = Vector::Zero(1);
    return sys;
}

}  // namespace delaylim::testing

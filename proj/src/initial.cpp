#include "delaylim/initial.hpp"

#include <cmath>

namespace delaylim {

const char* to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::Constant: return "constant";
        case InitialKind::Linear: return "linear";
        case InitialKind::Jump: return "jump";
        case InitialKind::FreeVibration: return "freevib";
    }
    return "?";
}

InitialKind initial_kind_from_string(const std::string& name) {
    if (name == "constant") return InitialKind::Constant;
    if (name == "linear") return InitialKind::Linear;
    if (name == "jump") return InitialKind::Jump;
    if (name == "freevib") return InitialKind::FreeVibration;
    throw InvalidParameter("unknown initial-function kind: " + name +
                           " (expected constant|linear|jump|freevib)");
}

InitialHistory build_initial_history(InitialKind kind, const Vector& headpoint,
                                     const DdeSystem& system, int r, double h) {
    const int dim = system.dimension();
    if (headpoint.size() != dim) {
        throw DimensionError("build_initial_history: headpoint dimension mismatch");
    }
    if (!headpoint.allFinite()) {
        throw InvalidInput("build_initial_history: headpoint has non-finite entries");
    }
    if (r < 1) {
        throw InvalidParameter("build_initial_history: r must be >= 1");
    }

    InitialHistory hist;
    hist.headpoint = headpoint;
    hist.kind = kind;
    hist.r = r;
    hist.h = h;
    hist.samples.resize(r + 1);

    const Vector& eq = system.equilibrium;
    switch (kind) {
        case InitialKind::Constant:
            for (auto& s : hist.samples) s = headpoint;
            break;
        case InitialKind::Linear:
            for (int k = 0; k <= r; ++k) {
                const double t = -(r - k) * h;
                hist.samples[k] = eq + (1.0 + t / system.tau) * (headpoint - eq);
            }
            break;
        case InitialKind::Jump:
            for (int k = 0; k < r; ++k) hist.samples[k] = eq;
            hist.samples[r] = headpoint;
            break;
        case InitialKind::FreeVibration: {
            if (!system.modes) {
                throw UnsupportedOperation(
                    "build_initial_history: free-vibration history needs vibration modes, "
                    "system '" + system.name + "' has none");
            }
            const ModeSet& modes = *system.modes;
            const int n = modes.dof();
            if (2 * n != dim) {
                throw DimensionError("build_initial_history: modes do not match state size");
            }
            const Vector offset = headpoint - eq;
            const Vector q0 = modes.inverse_shapes * offset.head(n);
            const Vector v0 = modes.inverse_shapes * offset.tail(n);
            Vector q(n), v(n);
            for (int k = 0; k <= r; ++k) {
                const double t = -(r - k) * h;
                for (int i = 0; i < n; ++i) {
                    const double w = modes.frequencies(i);
                    const double c = std::cos(w * t);
                    const double s = std::sin(w * t);
                    q(i) = q0(i) * c + v0(i) / w * s;
                    v(i) = -q0(i) * w * s + v0(i) * c;
                }
                Vector sample(dim);
                sample.head(n) = modes.shapes * q;
                sample.tail(n) = modes.shapes * v;
                hist.samples[k] = eq + sample;
            }
            hist.samples[r] = headpoint;  // guard the t = 0 sample against roundoff
            break;
        }
    }
    return hist;
}

}  // namespace delaylim

#pragma once

#include "delaylim/initial.hpp"
#include "delaylim/system.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace delaylim {

/// Magnitude beyond which a trajectory is declared numerically divergent.
inline constexpr double kDivergenceGuard = 1e12;

/// Precomputed one-step map advancing a sampled delayed state:
///
///     y_{i+1} = P y_i + Q B y_{i-r} + Q g(y_i, y_{i-r})
///
/// with h chosen so that the average discretized delay (r + 1/2) h equals tau.
struct SemiDiscMap {
    Matrix P;   ///< e^{A h}
    Matrix Q;   ///< ∫_0^h e^{A(h-s)} ds
    Matrix QB;  ///< Q * B
    int r = 0;
    double h = 0.0;
    std::shared_ptr<const DdeSystem> system;
};

SemiDiscMap build_map(std::shared_ptr<const DdeSystem> system, int r);

/// Convenience overload sampling an initial function with the map's r and h.
inline InitialHistory build_initial_history(InitialKind kind, const Vector& headpoint,
                                            const SemiDiscMap& map) {
    return build_initial_history(kind, headpoint, *map.system, map.r, map.h);
}

/// Ring buffer of the r+1 most recent samples y_i, ..., y_{i-r}.
class DelayedState {
public:
    DelayedState(const std::vector<Vector>& samples_oldest_first, double time, double h);

    const Vector& head() const { return buf_[head_]; }
    const Vector& tail() const { return buf_[(head_ + 1) % buf_.size()]; }
    double time() const { return time_; }
    int size() const { return static_cast<int>(buf_.size()); }

    /// Overwrites the oldest sample with `next` and advances time by h.
    void advance(const Vector& next);

private:
    std::vector<Vector> buf_;
    std::size_t head_ = 0;
    double time_ = 0.0;
    double h_ = 0.0;
};

enum class StepStatus { Ok, NonFinite };

/// Drives one trajectory of the map without retaining past samples.
class Simulation {
public:
    Simulation(const SemiDiscMap& map, const InitialHistory& initial);

    StepStatus step();
    const Vector& state() const { return state_.head(); }
    double time() const { return state_.time(); }
    long steps() const { return steps_; }

private:
    const SemiDiscMap* map_;
    DelayedState state_;
    Vector g_, next_;
    long steps_ = 0;
};

struct SampledTrajectory {
    std::vector<double> times;
    std::vector<Vector> states;  ///< initial samples followed by the generated ones
    bool nonfinite = false;      ///< stopped by the divergence guard
};

/// Steps the map from `initial`, calling `observer(time, state)` after every
/// step until it returns false or a non-finite state occurs. The r+1 initial
/// samples and every accepted step are returned; the sample the observer
/// rejected is not.
template <typename Observer>
SampledTrajectory simulate(const SemiDiscMap& map, const InitialHistory& initial,
                           Observer&& observer) {
    Simulation sim(map, initial);
    SampledTrajectory out;
    for (int k = 0; k <= initial.r; ++k) {
        out.times.push_back(-(initial.r - k) * initial.h);
        out.states.push_back(initial.samples[k]);
    }
    for (;;) {
        if (sim.step() == StepStatus::NonFinite) {
            out.nonfinite = true;
            break;
        }
        if (!observer(sim.time(), sim.state())) break;
        out.times.push_back(sim.time());
        out.states.push_back(sim.state());
    }
    return out;
}

}  // namespace delaylim

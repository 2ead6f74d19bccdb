#include "delaylim/semidisc.hpp"

#include <cmath>

namespace delaylim {

SemiDiscMap build_map(std::shared_ptr<const DdeSystem> system, int r) {
    if (!system) throw InvalidInput("build_map: null system");
    if (r < 1) throw InvalidParameter("build_map: sampling delay number r must be >= 1");

    SemiDiscMap map;
    map.r = r;
    map.h = system->tau / (r + 0.5);
    map.P = matrix_exponential(system->A, map.h);
    map.Q = exp_integral(system->A, map.h);
    map.QB = map.Q * system->B;
    map.system = std::move(system);
    return map;
}

DelayedState::DelayedState(const std::vector<Vector>& samples_oldest_first, double time, double h)
    : time_(time), h_(h) {
    if (samples_oldest_first.empty()) {
        throw InvalidInput("DelayedState: empty sample buffer");
    }
    buf_ = samples_oldest_first;
    head_ = buf_.size() - 1;
    for (const auto& s : buf_) {
        if (!s.allFinite()) throw InvalidInput("DelayedState: non-finite sample");
    }
}

void DelayedState::advance(const Vector& next) {
    head_ = (head_ + 1) % buf_.size();
    buf_[head_] = next;
    time_ += h_;
}

Simulation::Simulation(const SemiDiscMap& map, const InitialHistory& initial)
    : map_(&map),
      state_(initial.samples, 0.0, map.h),
      g_(map.system->dimension()),
      next_(map.system->dimension()) {
    if (initial.r != map.r || std::abs(initial.h - map.h) > 1e-12 * std::max(1.0, map.h)) {
        throw InvalidInput("Simulation: initial history sampled with a different r or h");
    }
    if (static_cast<int>(initial.samples.size()) != map.r + 1) {
        throw InvalidInput("Simulation: initial history must hold exactly r+1 samples");
    }
}

StepStatus Simulation::step() {
    const Vector& now = state_.head();
    const Vector& delayed = state_.tail();
    map_->system->nonlinearity(now, delayed, g_);
    next_.noalias() = map_->P * now;
    next_.noalias() += map_->QB * delayed;
    next_.noalias() += map_->Q * g_;
    ++steps_;
    if (!next_.allFinite() || next_.cwiseAbs().maxCoeff() > kDivergenceGuard) {
        return StepStatus::NonFinite;
    }
    state_.advance(next_);
    return StepStatus::Ok;
}

}  // namespace delaylim

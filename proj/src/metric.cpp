#include "delaylim/metric.hpp"

#include <cmath>

namespace delaylim {

Vector default_weights(const ModeSet& modes) {
    const int n = modes.dof();
    for (int i = 0; i < n; ++i) {
        if (modes.frequencies(i) == 0.0) {
            throw WeightsUndefined("default_weights: zero natural frequency, weights undefined");
        }
    }
    Vector w(2 * n);
    for (int i = 0; i < n; ++i) w(i) = modes.frequencies(i) * modes.frequencies(i);
    w.tail(n).setOnes();
    return w;
}

MetricSpace::MetricSpace(Vector weights, std::optional<ModeSet> modes, Vector origin)
    : weights_(std::move(weights)), origin_(std::move(origin)), modes_(std::move(modes)) {
    const int dim = dimension();
    if (weights_.size() != dim) {
        throw DimensionError("MetricSpace: weights must match the state dimension");
    }
    if (!(weights_.minCoeff() > 0.0)) {
        throw InvalidParameter("MetricSpace: weights must be strictly positive");
    }
    S_ = Matrix::Zero(dim, dim);
    if (modes_) {
        const int n = modes_->dof();
        if (2 * n != dim) {
            throw DimensionError("MetricSpace: modal transform does not match the state dimension");
        }
        S_.topLeftCorner(n, n) = modes_->inverse_shapes;
        S_.bottomRightCorner(n, n) = modes_->inverse_shapes;
    } else {
        S_.setIdentity();
    }
    for (int i = 0; i < dim; ++i) S_.row(i) *= std::sqrt(weights_(i));
    Sinv_ = S_.partialPivLu().inverse();
}

double MetricSpace::distance(const Vector& a, const Vector& b) const {
    const int dim = dimension();
    if (a.size() != dim || b.size() != dim) {
        throw DimensionError("MetricSpace::distance: dimension mismatch");
    }
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
        double z = 0.0;
        for (int j = 0; j < dim; ++j) z += S_(i, j) * (a(j) - b(j));
        sum += z * z;
    }
    return std::sqrt(sum);
}

double MetricSpace::distance_to_origin(const Vector& y) const {
    return distance(y, origin_);
}

double MetricSpace::length(const Vector& diff) const {
    const int dim = dimension();
    if (diff.size() != dim) {
        throw DimensionError("MetricSpace::length: dimension mismatch");
    }
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
        double z = 0.0;
        for (int j = 0; j < dim; ++j) z += S_(i, j) * diff(j);
        sum += z * z;
    }
    return std::sqrt(sum);
}

Vector MetricSpace::modal_energy_coordinates(const Vector& y) const {
    if (!modes_) {
        throw UnsupportedOperation("modal_energy_coordinates: no modal transform present");
    }
    if (y.size() != dimension()) {
        throw DimensionError("modal_energy_coordinates: dimension mismatch");
    }
    const int n = modes_->dof();
    const Vector offset = y - origin_;
    const Vector q = modes_->inverse_shapes * offset.head(n);
    const Vector v = modes_->inverse_shapes * offset.tail(n);
    Vector rho(n);
    for (int i = 0; i < n; ++i) {
        const double w = modes_->frequencies(i);
        rho(i) = std::sqrt(w * w * q(i) * q(i) + v(i) * v(i));
    }
    return rho;
}

Vector MetricSpace::to_metric(const Vector& y) const {
    if (y.size() != dimension()) {
        throw DimensionError("MetricSpace::to_metric: dimension mismatch");
    }
    return S_ * (y - origin_);
}

Vector MetricSpace::from_metric(const Vector& z) const {
    if (z.size() != dimension()) {
        throw DimensionError("MetricSpace::from_metric: dimension mismatch");
    }
    return origin_ + Sinv_ * z;
}

double inscribed_radius(const MetricSpace& metric, const Vector& lower, const Vector& upper) {
    const int dim = metric.dimension();
    if (lower.size() != dim || upper.size() != dim) {
        throw DimensionError("inscribed_radius: bounds dimension mismatch");
    }
    const Matrix& sinv = metric.inverse_transform();
    double radius = std::numeric_limits<double>::infinity();
    for (int k = 0; k < dim; ++k) {
        // min_{v_k = c} |S v| = |c| / |row_k(S^{-1})|
        const double row_norm = sinv.row(k).norm();
        const double to_lower = std::abs(metric.origin()(k) - lower(k)) / row_norm;
        const double to_upper = std::abs(upper(k) - metric.origin()(k)) / row_norm;
        radius = std::min({radius, to_lower, to_upper});
    }
    return radius;
}

}  // namespace delaylim

#pragma once

#include "delaylim/numerics.hpp"

#include <optional>

namespace delaylim {

/// Energy-based default weights [w_1^2, ..., w_n^2, 1, ..., 1].
/// Throws WeightsUndefined when any frequency is zero.
Vector default_weights(const ModeSet& modes);

/// Weighted Euclidean distance on headpoints, evaluated in modal coordinates
/// when a modal transform is present, in physical coordinates otherwise.
class MetricSpace {
public:
    /// `weights` must be strictly positive and of the state dimension; when
    /// `modes` is given, the first half weights modal positions and the
    /// second half modal velocities.
    MetricSpace(Vector weights, std::optional<ModeSet> modes, Vector origin);

    int dimension() const { return static_cast<int>(origin_.size()); }
    const Vector& origin() const { return origin_; }
    const Vector& weights() const { return weights_; }
    bool has_modal_transform() const { return modes_.has_value(); }
    const std::optional<ModeSet>& modes() const { return modes_; }

    double distance(const Vector& a, const Vector& b) const;
    double distance_to_origin(const Vector& y) const;
    /// Metric length of a difference vector.
    double length(const Vector& diff) const;

    /// Square roots of the per-mode energies relative to the origin.
    Vector modal_energy_coordinates(const Vector& y) const;

    /// z = S (y - origin); the distance to the origin is |z|.
    Vector to_metric(const Vector& y) const;
    /// Inverse of to_metric: y = origin + S^{-1} z.
    Vector from_metric(const Vector& z) const;

    const Matrix& transform() const { return S_; }
    const Matrix& inverse_transform() const { return Sinv_; }

private:
    Vector weights_, origin_;
    std::optional<ModeSet> modes_;
    Matrix S_, Sinv_;
};

/// Radius of the largest metric ball centered at the metric origin that fits
/// inside the box [lower, upper].
double inscribed_radius(const MetricSpace& metric, const Vector& lower, const Vector& upper);

}  // namespace delaylim

#include "delaylim/classify.hpp"

#include <algorithm>
#include <cmath>

namespace delaylim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t hash_window(const CellId* data, std::size_t len) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= mix64(data[i]);
        h *= 0x100000001B3ull;
    }
    return h;
}

bool all_equal(const CellId* data, std::size_t len) {
    for (std::size_t i = 1; i < len; ++i) {
        if (data[i] != data[0]) return false;
    }
    return true;
}

}  // namespace

CellGrid::CellGrid(Vector lower, Vector upper, int n_disc)
    : lower_(std::move(lower)), upper_(std::move(upper)), n_(n_disc) {
    if (lower_.size() != upper_.size() || lower_.size() == 0) {
        throw DimensionError("CellGrid: bounds must be non-empty and of equal size");
    }
    if (n_ < 1) {
        throw InvalidParameter("CellGrid: n_disc must be >= 1");
    }
    for (int k = 0; k < dimension(); ++k) {
        if (!(lower_(k) < upper_(k))) {
            throw InvalidParameter("CellGrid: lower bound must be below upper bound");
        }
    }
    std::uint64_t cells = 1;
    for (int k = 0; k < dimension(); ++k) {
        if (cells > (std::uint64_t{1} << 62) / static_cast<std::uint64_t>(n_)) {
            throw InvalidParameter("CellGrid: n_disc^dimension exceeds the index range");
        }
        cells *= static_cast<std::uint64_t>(n_);
    }
    width_ = (upper_ - lower_) / static_cast<double>(n_);
}

CellId CellGrid::cell_of(const Vector& point) const {
    if (point.size() != lower_.size()) {
        throw DimensionError("CellGrid::cell_of: point dimension mismatch");
    }
    CellId id = 0;
    std::uint64_t stride = 1;
    for (int k = 0; k < dimension(); ++k) {
        const double x = point(k);
        if (!(x >= lower_(k)) || !(x <= upper_(k))) return kCellOutOfBounds;
        int idx = static_cast<int>((x - lower_(k)) / width_(k));
        if (idx >= n_) idx = n_ - 1;  // closed top edge
        if (idx < 0) idx = 0;
        id += stride * static_cast<std::uint64_t>(idx);
        stride *= static_cast<std::uint64_t>(n_);
    }
    return id;
}

bool CellGrid::contains(const Vector& point) const {
    return cell_of(point) != kCellOutOfBounds;
}

std::vector<int> CellGrid::indices(CellId cell) const {
    if (cell == kCellOutOfBounds) {
        throw InvalidInput("CellGrid::indices: out-of-bounds cell");
    }
    std::vector<int> idx(dimension());
    for (int k = 0; k < dimension(); ++k) {
        idx[k] = static_cast<int>(cell % static_cast<std::uint64_t>(n_));
        cell /= static_cast<std::uint64_t>(n_);
    }
    return idx;
}

CellId CellGrid::pack(const std::vector<int>& indices) const {
    if (static_cast<int>(indices.size()) != dimension()) {
        throw DimensionError("CellGrid::pack: index dimension mismatch");
    }
    CellId id = 0;
    std::uint64_t stride = 1;
    for (int k = 0; k < dimension(); ++k) {
        if (indices[k] < 0 || indices[k] >= n_) {
            throw InvalidInput("CellGrid::pack: index out of range");
        }
        id += stride * static_cast<std::uint64_t>(indices[k]);
        stride *= static_cast<std::uint64_t>(n_);
    }
    return id;
}

Vector CellGrid::cell_center(CellId cell) const {
    const auto idx = indices(cell);
    Vector center(dimension());
    for (int k = 0; k < dimension(); ++k) {
        center(k) = lower_(k) + (idx[k] + 0.5) * width_(k);
    }
    return center;
}

Vector CellGrid::cell_widths() const { return width_; }

const char* to_string(Outcome outcome) {
    switch (outcome) {
        case Outcome::ConvergedDesired: return "converged_desired";
        case Outcome::DivergedOutOfBounds: return "diverged_out_of_bounds";
        case Outcome::ConvergedNewFixedPoint: return "converged_new_fixed_point";
        case Outcome::Periodic: return "periodic";
        case Outcome::MatchedPrevious: return "matched_previous";
        case Outcome::TimedOut: return "timed_out";
        case Outcome::DivergedNumeric: return "diverged_numeric";
    }
    return "?";
}

AttractorRegistry::AttractorRegistry(const CellGrid& grid, const Vector& equilibrium,
                                     int neighborhood_radius, int m_match)
    : m_match_(m_match) {
    if (neighborhood_radius < 0) {
        throw InvalidParameter("AttractorRegistry: neighborhood radius must be >= 0");
    }
    if (m_match_ < 1) {
        throw InvalidParameter("AttractorRegistry: m_match must be >= 1");
    }
    equilibrium_cell_ = grid.cell_of(equilibrium);
    if (equilibrium_cell_ == kCellOutOfBounds) {
        throw ConfigError("AttractorRegistry: equilibrium lies outside the grid");
    }
    const auto base = grid.indices(equilibrium_cell_);
    const int dim = grid.dimension();
    std::vector<int> offset(dim, -neighborhood_radius);
    std::vector<int> idx(dim);
    for (;;) {
        bool in_range = true;
        for (int k = 0; k < dim; ++k) {
            idx[k] = base[k] + offset[k];
            if (idx[k] < 0 || idx[k] >= grid.n_disc()) {
                in_range = false;
                break;
            }
        }
        if (in_range) desired_.insert(grid.pack(idx));
        int k = 0;
        while (k < dim && ++offset[k] > neighborhood_radius) {
            offset[k] = -neighborhood_radius;
            ++k;
        }
        if (k == dim) break;
    }
}

const int* AttractorRegistry::fixed_point_discoverer(CellId cell) const {
    const auto it = fixed_points_.find(cell);
    return it == fixed_points_.end() ? nullptr : &it->second;
}

std::optional<AttractorRegistry::Match> AttractorRegistry::find_window(
    const std::vector<CellId>& stored, std::size_t end) const {
    const std::size_t m = static_cast<std::size_t>(m_match_);
    if (end < m || end > stored.size()) return std::nullopt;
    const CellId* w = stored.data() + (end - m);
    const auto it = windows_.find(hash_window(w, m));
    if (it == windows_.end()) return std::nullopt;
    for (const auto& [rec, pos] : it->second) {
        const auto& seq = expanded_[rec];
        const CellId* candidate = seq.data() + (pos + 1 - m);
        if (std::equal(w, w + m, candidate)) {
            return Match{records_[rec].id, records_[rec].classification.effective()};
        }
    }
    return std::nullopt;
}

void AttractorRegistry::add(TrajectoryRecord record) {
    if (!ids_.insert(record.id).second) {
        throw InvalidInput("AttractorRegistry::add: duplicate record id " +
                           std::to_string(record.id));
    }
    if (record.classification.outcome == Outcome::ConvergedNewFixedPoint) {
        const CellId cell = record.classification.new_fixed_point;
        if (fixed_points_.emplace(cell, record.id).second) {
            fixed_point_list_.push_back(cell);
        }
    }
    std::vector<CellId> seq;
    for (const auto& run : record.cells) {
        seq.insert(seq.end(), run.count, run.cell);
    }
    records_.push_back(std::move(record));
    expanded_.push_back(std::move(seq));
    index_record(records_.size() - 1);
}

void AttractorRegistry::index_record(std::size_t idx) {
    const auto& seq = expanded_[idx];
    const std::size_t m = static_cast<std::size_t>(m_match_);
    if (seq.size() < m) return;
    for (std::size_t end = m - 1; end < seq.size(); ++end) {
        const CellId* w = seq.data() + (end + 1 - m);
        if (all_equal(w, m)) continue;
        windows_[hash_window(w, m)].push_back(
            {static_cast<std::uint32_t>(idx), static_cast<std::uint32_t>(end)});
    }
}

void register_record(AttractorRegistry& registry, TrajectoryRecord record) {
    registry.add(std::move(record));
}

OnlineClassifier::OnlineClassifier(const CellGrid& grid, const AttractorRegistry& registry,
                                   const ClassifierParams& params, double tau, bool probe_mode)
    : grid_(&grid),
      registry_(&registry),
      params_(params),
      tau_(tau),
      probe_(probe_mode),
      m_match_(params.effective_m_match()),
      store_interval_(tau / params.n_tau),
      next_store_(0.0) {
    if (tau_ <= 0.0) throw InvalidParameter("OnlineClassifier: tau must be positive");
    if (params_.n_tau < 1) throw InvalidParameter("OnlineClassifier: n_tau must be >= 1");
    if (params_.k_rep < 1) throw InvalidParameter("OnlineClassifier: k_rep must be >= 1");
    if (params_.dwell_factor < 1.0) {
        throw InvalidParameter("OnlineClassifier: dwell factor must be >= 1");
    }
}

std::optional<Classification> OnlineClassifier::feed(double t, const Vector& state) {
    last_time_ = t;
    const CellId cell = grid_->cell_of(state);

    // 1. out of the space boundary
    if (cell == kCellOutOfBounds) {
        return Classification{.outcome = Outcome::DivergedOutOfBounds};
    }

    // 2. dwell in the desired equilibrium cell or its neighborhood. Suspended
    // in probe mode, where dwell alone cannot separate slow instabilities
    // from convergence; the probe resolves through the metric-contraction
    // race and the trailing dwell at t_max.
    if (registry_->is_desired_cell(cell)) {
        if (!in_desired_) {
            in_desired_ = true;
            desired_enter_ = t;
        } else if (!probe_ && t - desired_enter_ > params_.dwell_factor * tau_) {
            return Classification{.outcome = Outcome::ConvergedDesired};
        }
    } else {
        in_desired_ = false;
    }

    // 3. dwell in a single cell away from the equilibrium
    if (cell != current_cell_) {
        current_cell_ = cell;
        cell_enter_ = t;
    } else if (t - cell_enter_ > params_.ghost_factor * tau_ &&
               !registry_->is_desired_cell(cell)) {
        if (const int* discoverer = registry_->fixed_point_discoverer(cell)) {
            Classification c;
            c.outcome = Outcome::MatchedPrevious;
            c.matched_id = *discoverer;
            c.inherited = Outcome::ConvergedNewFixedPoint;
            return c;
        }
        Classification c;
        c.outcome = Outcome::ConvergedNewFixedPoint;
        c.new_fixed_point = cell;
        return c;
    }

    // 4./5. periodicity and reuse run on the sub-sampled stored steps
    while (t >= next_store_) {
        next_store_ += store_interval_;
        stored_.push_back(cell);
        if (auto c = on_stored_step()) return c;
    }

    // 6. timeout
    if (t >= params_.t_max) {
        if (probe_ && !escaped_ && in_desired_ &&
            t - desired_enter_ > params_.dwell_factor * tau_) {
            return Classification{.outcome = Outcome::ConvergedDesired};
        }
        return Classification{.outcome = Outcome::TimedOut};
    }
    return std::nullopt;
}

std::optional<Classification> OnlineClassifier::on_stored_step() {
    const CellId newest = stored_.back();
    // Settling near the equilibrium is resolved by the dwell rules.
    if (registry_->is_desired_cell(newest)) return std::nullopt;

    const std::size_t len = stored_.size();
    const std::size_t n_window = static_cast<std::size_t>(params_.n_tau);

    // 4. the latest window of duration tau reappeared k_rep times earlier
    if (len >= n_window) {
        const CellId* w = stored_.data() + (len - n_window);
        if (!all_equal(w, n_window)) {
            auto& positions = window_positions_[hash_window(w, n_window)];
            int repetitions = 0;
            for (const auto pos : positions) {
                const CellId* earlier = stored_.data() + (pos + 1 - n_window);
                if (std::equal(w, w + n_window, earlier)) ++repetitions;
            }
            if (repetitions >= params_.k_rep) {
                return Classification{.outcome = Outcome::Periodic};
            }
            positions.push_back(static_cast<std::uint32_t>(len - 1));
        }
    }

    // 5. the latest m_match stored steps retrace a classified trajectory
    if (params_.reuse && !probe_ && len >= static_cast<std::size_t>(m_match_)) {
        const CellId* w = stored_.data() + (len - static_cast<std::size_t>(m_match_));
        if (!all_equal(w, static_cast<std::size_t>(m_match_))) {
            if (auto match = registry_->find_window(stored_, len)) {
                Classification c;
                c.outcome = Outcome::MatchedPrevious;
                c.matched_id = match->record_id;
                c.inherited = match->resolved;
                return c;
            }
        }
    }
    return std::nullopt;
}

Classification OnlineClassifier::on_nonfinite() const {
    return Classification{.outcome = Outcome::DivergedNumeric};
}

std::vector<CellRun> OnlineClassifier::compressed_cells() const {
    std::vector<CellRun> runs;
    for (const CellId cell : stored_) {
        if (!runs.empty() && runs.back().cell == cell) {
            ++runs.back().count;
        } else {
            runs.push_back({cell, 1});
        }
    }
    return runs;
}

Classification classify_online(const CellGrid& grid, const AttractorRegistry& registry,
                               const ClassifierParams& params, double tau,
                               const std::vector<double>& times,
                               const std::vector<Vector>& states) {
    if (times.empty() || states.empty()) {
        throw InvalidInput("classify_online: empty sample stream");
    }
    if (times.size() != states.size()) {
        throw InvalidInput("classify_online: times and states must have equal length");
    }
    OnlineClassifier classifier(grid, registry, params, tau);
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (auto c = classifier.feed(times[i], states[i])) return *c;
    }
    throw InvalidInput("classify_online: stream ended before any rule fired");
}

}  // namespace delaylim

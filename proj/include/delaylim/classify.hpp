#pragma once

#include "delaylim/types.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace delaylim {

/// Packed cell index; kCellOutOfBounds marks points outside the grid.
using CellId = std::uint64_t;
inline constexpr CellId kCellOutOfBounds = ~CellId{0};

/// Hyperrectangular grid with the same number of cells per coordinate direction.
/// The upper boundary is closed: a point exactly on it maps to the last cell.
class CellGrid {
public:
    CellGrid(Vector lower, Vector upper, int n_disc);

    int dimension() const { return static_cast<int>(lower_.size()); }
    int n_disc() const { return n_; }
    const Vector& lower() const { return lower_; }
    const Vector& upper() const { return upper_; }

    CellId cell_of(const Vector& point) const;
    bool contains(const Vector& point) const;

    std::vector<int> indices(CellId cell) const;
    CellId pack(const std::vector<int>& indices) const;
    Vector cell_center(CellId cell) const;
    Vector cell_widths() const;

private:
    Vector lower_, upper_, width_;
    int n_ = 0;
};

enum class Outcome {
    ConvergedDesired,
    DivergedOutOfBounds,
    ConvergedNewFixedPoint,
    Periodic,
    MatchedPrevious,
    TimedOut,
    DivergedNumeric,
};

const char* to_string(Outcome outcome);

struct Classification {
    Outcome outcome = Outcome::TimedOut;
    CellId new_fixed_point = kCellOutOfBounds;  ///< set for ConvergedNewFixedPoint
    int matched_id = -1;                        ///< set for MatchedPrevious
    Outcome inherited = Outcome::TimedOut;      ///< resolved class of the matched record

    /// Resolved terminal class (follows MatchedPrevious inheritance).
    Outcome effective() const {
        return outcome == Outcome::MatchedPrevious ? inherited : outcome;
    }
    /// Everything except convergence to the desired fixed point counts as
    /// divergent, timeouts included.
    bool divergent() const { return effective() != Outcome::ConvergedDesired; }
};

/// Run-length compressed stored step: `count` consecutive stored steps in `cell`.
struct CellRun {
    CellId cell;
    std::uint32_t count;
};

struct TrajectoryRecord {
    int id = -1;
    std::vector<CellRun> cells;  ///< stored steps, one per tau/n_tau of time
    Classification classification;
    Vector ich;
    double ich_distance = 0.0;
};

struct ClassifierParams {
    double dwell_factor = 1.0;    ///< convergence dwell threshold in units of tau
    double ghost_factor = 2.0;    ///< fixed-point dwell threshold t̄ in units of tau
    int neighborhood_radius = 1;  ///< Chebyshev radius of the convergent cell block
    int n_tau = 10;               ///< stored steps per delay interval
    int k_rep = 2;                ///< earlier window repetitions for the periodic rule
    int m_match = 0;              ///< reuse window length in stored steps; 0 means n_tau
    double t_max = 1000.0;
    bool reuse = true;

    int effective_m_match() const { return m_match > 0 ? m_match : n_tau; }
};

/// Known fixed-point cells plus the archive of classified trajectories.
/// One writer at a time; classification reads a frozen snapshot.
class AttractorRegistry {
public:
    AttractorRegistry(const CellGrid& grid, const Vector& equilibrium,
                      int neighborhood_radius, int m_match);

    bool is_desired_cell(CellId cell) const { return desired_.count(cell) != 0; }
    /// Record id that discovered the fixed point in `cell`, or nullptr.
    const int* fixed_point_discoverer(CellId cell) const;
    const std::vector<CellId>& fixed_point_cells() const { return fixed_point_list_; }
    const std::vector<TrajectoryRecord>& records() const { return records_; }
    CellId equilibrium_cell() const { return equilibrium_cell_; }
    int m_match() const { return m_match_; }

    struct Match {
        int record_id;
        Outcome resolved;
    };
    /// Looks up a reuse window (verified element-wise, not just by hash).
    std::optional<Match> find_window(const std::vector<CellId>& stored, std::size_t end) const;

    void add(TrajectoryRecord record);

private:
    void index_record(std::size_t idx);

    std::unordered_set<CellId> desired_;
    CellId equilibrium_cell_ = kCellOutOfBounds;
    std::unordered_map<CellId, int> fixed_points_;
    std::vector<CellId> fixed_point_list_;
    std::vector<TrajectoryRecord> records_;
    std::vector<std::vector<CellId>> expanded_;  // stored steps per record
    std::unordered_map<std::uint64_t, std::vector<std::pair<std::uint32_t, std::uint32_t>>> windows_;
    std::unordered_set<int> ids_;
    int m_match_ = 10;
};

/// Streaming classifier. Feed every integration sample in order; the first
/// matching rule ends the trajectory. In probe mode the convergence dwell rule
/// is suspended and resolved once at t_max from the trailing dwell, so that
/// slowly growing instabilities are not mistaken for convergence.
class OnlineClassifier {
public:
    OnlineClassifier(const CellGrid& grid, const AttractorRegistry& registry,
                     const ClassifierParams& params, double tau, bool probe_mode = false);

    std::optional<Classification> feed(double t, const Vector& state);
    Classification on_nonfinite() const;

    /// Probe mode only: the trajectory left the probe scale, so a later
    /// trailing dwell must not count as convergence.
    void mark_escaped() { escaped_ = true; }

    /// Run-length compressed stored steps accumulated so far.
    std::vector<CellRun> compressed_cells() const;
    long stored_steps() const { return static_cast<long>(stored_.size()); }

private:
    std::optional<Classification> on_stored_step();

    const CellGrid* grid_;
    const AttractorRegistry* registry_;
    ClassifierParams params_;
    double tau_;
    bool probe_;
    bool escaped_ = false;
    int m_match_;

    bool in_desired_ = false;
    double desired_enter_ = 0.0;
    CellId current_cell_ = kCellOutOfBounds;
    double cell_enter_ = 0.0;
    double last_time_ = 0.0;

    double store_interval_;
    double next_store_;
    std::vector<CellId> stored_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> window_positions_;
};

/// Classifies a complete sample stream; throws InvalidInput on an empty stream
/// or when the stream ends before any rule (including the timeout) fires.
Classification classify_online(const CellGrid& grid, const AttractorRegistry& registry,
                               const ClassifierParams& params, double tau,
                               const std::vector<double>& times,
                               const std::vector<Vector>& states);

/// Appends a classified record and merges any discovered fixed-point cell.
/// Throws InvalidInput on a duplicate id.
void register_record(AttractorRegistry& registry, TrajectoryRecord record);

}  // namespace delaylim

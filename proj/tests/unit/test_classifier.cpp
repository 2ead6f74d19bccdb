#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "delaylim/classify.hpp"
#include "delaylim/metric.hpp"
#include "delaylim/semidisc.hpp"
#include "delaylim/system.hpp"

#include <cmath>
#include <random>

using namespace delaylim;

namespace {

// 1-D playground: unit cells on [0, n], equilibrium in cell 0, tau = 1.25 so
// that the store interval 0.125 is exact in binary.
struct Playground {
    CellGrid grid;
    AttractorRegistry registry;
    ClassifierParams params;
    double tau = 1.25;

    explicit Playground(int n = 30, int m_match = 10)
        : grid(Vector::Zero(1), Vector::Constant(1, double(n)), n),
          registry(grid, Vector::Constant(1, 0.5), 1, m_match) {
        params.n_tau = 10;
        params.m_match = m_match;
        params.t_max = 100.0;
    }

    Vector center(int cell) const { return Vector::Constant(1, cell + 0.5); }

    // feeds cell-center samples at the store cadence; returns the sample index
    // at which the classifier fired
    std::pair<Classification, int> classify_cells(const std::vector<int>& cells,
                                                  OnlineClassifier& classifier) const {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const Vector state = cells[i] >= 0 ? center(cells[i])
                                               : Vector::Constant(1, double(grid.n_disc()) + 1.0);
            if (auto c = classifier.feed(0.125 * static_cast<double>(i), state)) {
                return {*c, static_cast<int>(i)};
            }
        }
        FAIL("stream ended unclassified");
        return {{}, -1};
    }

    std::pair<Classification, int> classify_cells(const std::vector<int>& cells) const {
        OnlineClassifier classifier(grid, registry, params, tau);
        return classify_cells(cells, classifier);
    }
};

std::vector<int> repeat_loop(const std::vector<int>& loop, int total) {
    std::vector<int> cells;
    for (int i = 0; i < total; ++i) cells.push_back(loop[i % loop.size()]);
    return cells;
}

}  // namespace

TEST_CASE("cell indexing on the square benchmark grid") {
    const CellGrid grid(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0), 501);
    const auto mid = grid.indices(grid.cell_of(Vector::Zero(2)));
    CHECK(mid[0] == 250);
    CHECK(mid[1] == 250);

    Vector outside(2);
    outside << 6.0, 0.0;
    CHECK(grid.cell_of(outside) == kCellOutOfBounds);

    const auto top = grid.indices(grid.cell_of(Vector::Constant(2, 5.0)));
    CHECK(top[0] == 500);  // the upper boundary belongs to the last cell
    CHECK(top[1] == 500);
    const auto bottom = grid.indices(grid.cell_of(Vector::Constant(2, -5.0)));
    CHECK(bottom[0] == 0);

    CHECK(grid.pack(mid) == grid.cell_of(Vector::Zero(2)));
    // cell 250 of an odd grid is centered on the origin
    CHECK(grid.cell_center(grid.cell_of(Vector::Zero(2))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("grid construction is validated") {
    CHECK_THROWS_AS(CellGrid(Vector::Zero(2), Vector::Ones(3), 10), DimensionError);
    CHECK_THROWS_AS(CellGrid(Vector::Ones(2), Vector::Zero(2), 10), InvalidParameter);
    CHECK_THROWS_AS(CellGrid(Vector::Zero(2), Vector::Ones(2), 0), InvalidParameter);
}

TEST_CASE("dwelling in the equilibrium cell converges") {
    const Playground pg;
    const auto [cls, at] = pg.classify_cells(std::vector<int>(30, 0));
    CHECK(cls.outcome == Outcome::ConvergedDesired);
    CHECK_FALSE(cls.divergent());
    // fires at the first sample with t - 0 > tau: t = 1.375, sample 11
    CHECK(at == 11);
}

TEST_CASE("the neighborhood of the equilibrium counts as convergent") {
    const Playground pg;
    // flip-flop between cells 0 and 1, both inside the radius-1 neighborhood
    const auto [cls, at] = pg.classify_cells(repeat_loop({0, 1}, 30));
    CHECK(cls.outcome == Outcome::ConvergedDesired);
    CHECK(at == 11);
}

TEST_CASE("leaving the space boundary diverges immediately") {
    const Playground pg;
    const auto [cls, at] = pg.classify_cells({5, -1});
    CHECK(cls.outcome == Outcome::DivergedOutOfBounds);
    CHECK(cls.divergent());
    CHECK(at == 1);
}

TEST_CASE("a repeated five-cell loop is recognized as periodic") {
    const Playground pg;
    const auto [cls, at] = pg.classify_cells(repeat_loop({3, 4, 5, 6, 7}, 40));
    CHECK(cls.outcome == Outcome::Periodic);
    CHECK(cls.divergent());
    // window length 10 (two loop turns); the window ending at stored step 19
    // already appeared ending at steps 9 and 14
    CHECK(at == 19);
}

TEST_CASE("dwelling in a remote cell discovers a new fixed point") {
    Playground pg;
    const auto [cls, at] = pg.classify_cells(std::vector<int>(40, 20));
    CHECK(cls.outcome == Outcome::ConvergedNewFixedPoint);
    CHECK(cls.divergent());
    CHECK(cls.new_fixed_point == pg.grid.cell_of(pg.center(20)));
    // ghost guard: fires only past 2 tau = 2.5, i.e. at t = 2.625
    CHECK(at == 21);

    // once registered, the cell is treated as a known attractor
    TrajectoryRecord record;
    record.id = 1;
    record.cells = {{cls.new_fixed_point, 21}};
    record.classification = cls;
    record.ich = pg.center(20);
    register_record(pg.registry, record);
    CHECK(pg.registry.fixed_point_cells().size() == 1);

    const auto [second, at2] = pg.classify_cells(std::vector<int>(40, 20));
    CHECK(second.outcome == Outcome::MatchedPrevious);
    CHECK(second.matched_id == 1);
    CHECK(second.inherited == Outcome::ConvergedNewFixedPoint);
    CHECK(second.divergent());
    CHECK(at2 == 21);
}

TEST_CASE("retracing a classified trajectory inherits its class") {
    Playground pg;
    std::vector<int> path;
    for (int c = 2; c <= 25; ++c) path.push_back(c);
    path.push_back(-1);  // leaves the boundary

    OnlineClassifier classifier(pg.grid, pg.registry, pg.params, pg.tau);
    const auto [first, at_first] = pg.classify_cells(path, classifier);
    CHECK(first.outcome == Outcome::DivergedOutOfBounds);

    TrajectoryRecord record;
    record.id = 7;
    record.cells = classifier.compressed_cells();
    record.classification = first;
    record.ich = pg.center(2);
    register_record(pg.registry, record);

    const auto [second, at_second] = pg.classify_cells(path);
    CHECK(second.outcome == Outcome::MatchedPrevious);
    CHECK(second.matched_id == 7);
    CHECK(second.inherited == Outcome::DivergedOutOfBounds);
    // the reuse window is complete after m_match = 10 stored steps
    CHECK(at_second == 9);
    CHECK(at_second < at_first);
}

TEST_CASE("reuse can be disabled") {
    Playground pg;
    std::vector<int> path;
    for (int c = 2; c <= 25; ++c) path.push_back(c);
    path.push_back(-1);

    OnlineClassifier classifier(pg.grid, pg.registry, pg.params, pg.tau);
    const auto [first, at1] = pg.classify_cells(path, classifier);
    TrajectoryRecord record;
    record.id = 0;
    record.cells = classifier.compressed_cells();
    record.classification = first;
    register_record(pg.registry, record);

    pg.params.reuse = false;
    const auto [second, at2] = pg.classify_cells(path);
    CHECK(second.outcome == Outcome::DivergedOutOfBounds);
    CHECK(at2 == at1);
}

TEST_CASE("a fresh registry can never match a previous trajectory") {
    const Playground pg;
    CHECK(pg.registry.records().empty());
    std::vector<int> path;
    for (int c = 2; c <= 25; ++c) path.push_back(c);
    path.push_back(-1);
    const auto [cls, at] = pg.classify_cells(path);
    CHECK(cls.outcome != Outcome::MatchedPrevious);
}

TEST_CASE("slow drift without recurrence times out as divergent") {
    Playground pg(60);
    pg.params.t_max = 2.0;
    std::vector<int> path;
    for (int c = 2; c < 60; ++c) path.push_back(c);
    const auto [cls, at] = pg.classify_cells(path);
    CHECK(cls.outcome == Outcome::TimedOut);
    CHECK(cls.divergent());
    CHECK(at == 16);  // first sample at t >= 2
}

TEST_CASE("duplicate record ids are rejected") {
    Playground pg;
    TrajectoryRecord record;
    record.id = 3;
    record.cells = {{pg.grid.cell_of(pg.center(4)), 5}};
    record.classification = Classification{.outcome = Outcome::TimedOut};
    register_record(pg.registry, record);
    CHECK_THROWS_AS(register_record(pg.registry, record), InvalidInput);
}

TEST_CASE("classify_online validates its stream") {
    const Playground pg;
    CHECK_THROWS_AS(
        classify_online(pg.grid, pg.registry, pg.params, pg.tau, {}, {}), InvalidInput);
    // a stream that ends before any rule fires is rejected as well
    CHECK_THROWS_AS(classify_online(pg.grid, pg.registry, pg.params, pg.tau, {0.0},
                                    {pg.center(5)}),
                    InvalidInput);
}

TEST_CASE("classification is deterministic and total on random walks") {
    Playground pg(40);
    pg.params.t_max = 6.0;
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> step(-1, 1);
    for (int rep = 0; rep < 25; ++rep) {
        std::vector<int> cells{20};
        for (int i = 0; i < 100; ++i) {
            cells.push_back(std::clamp(cells.back() + step(rng), 0, 39));
        }
        const auto [a, at_a] = pg.classify_cells(cells);
        const auto [b, at_b] = pg.classify_cells(cells);
        CHECK(a.outcome == b.outcome);
        CHECK(at_a == at_b);
        CHECK(at_a <= 49);  // t_max at sample 48; every stream resolves by then
    }
}

TEST_CASE("stored steps stay within the compression bound") {
    Playground pg(40);
    pg.params.t_max = 50.0;
    OnlineClassifier classifier(pg.grid, pg.registry, pg.params, pg.tau);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> cell(3, 39);
    double t = 0.0;
    const double h = 0.06125;
    for (int i = 0; i < 400; ++i, t += h) {
        if (classifier.feed(t, pg.center(cell(rng)))) break;
    }
    const double interval = pg.tau / pg.params.n_tau;
    CHECK(classifier.stored_steps() <= static_cast<long>(std::ceil(t / interval)) + 1);
}

TEST_CASE("reuse never changes the effective class on the duffing benchmark") {
    auto sys = std::make_shared<const DdeSystem>(duffing({.a = 1.0, .zeta = 0.1, .tau = 0.1}));
    const SemiDiscMap map = build_map(sys, 30);
    const MetricSpace metric(default_weights(*sys->modes), sys->modes, sys->equilibrium);
    const CellGrid grid(Vector::Constant(2, -5.0), Vector::Constant(2, 5.0), 501);

    ClassifierParams params;
    params.ghost_factor = 20.0;  // the settling spiral crosses cells slower than 2 tau
    params.t_max = 1000.0;

    const auto run_one = [&](const Vector& head, const AttractorRegistry& registry,
                             const ClassifierParams& p) {
        OnlineClassifier classifier(grid, registry, p, sys->tau);
        Simulation sim(map, build_initial_history(InitialKind::FreeVibration, head, map));
        std::optional<Classification> cls = classifier.feed(0.0, head);
        while (!cls) {
            if (sim.step() == StepStatus::NonFinite) {
                cls = classifier.on_nonfinite();
                break;
            }
            cls = classifier.feed(sim.time(), sim.state());
        }
        return std::pair{*cls, classifier.compressed_cells()};
    };

    AttractorRegistry shared(grid, sys->equilibrium, params.neighborhood_radius,
                             params.effective_m_match());
    ClassifierParams no_reuse = params;
    no_reuse.reuse = false;

    int reused = 0;
    int id = 0;
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            Vector head(2);
            head << -3.0 + 6.0 * i / 9.0, -3.0 + 6.0 * j / 9.0;

            auto [with_reuse, cells] = run_one(head, shared, params);
            AttractorRegistry fresh(grid, sys->equilibrium, params.neighborhood_radius,
                                    params.effective_m_match());
            auto [baseline, cells_baseline] = run_one(head, fresh, no_reuse);

            CAPTURE(head(0));
            CAPTURE(head(1));
            CHECK(with_reuse.effective() == baseline.effective());
            if (with_reuse.outcome == Outcome::MatchedPrevious) ++reused;

            TrajectoryRecord record;
            record.id = id++;
            record.cells = std::move(cells);
            record.classification = with_reuse;
            record.ich = head;
            record.ich_distance = metric.distance_to_origin(head);
            register_record(shared, record);
        }
    }
    CHECK(reused > 0);  // the rule must actually fire somewhere on this set
}

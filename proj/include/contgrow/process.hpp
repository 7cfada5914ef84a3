#pragma once

#include "contgrow/cellgrid.hpp"
#include "contgrow/geometry.hpp"
#include "contgrow/radius.hpp"
#include "contgrow/thinning.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <unordered_map>
#include <vector>

namespace contgrow {

enum class InfectionType : std::uint8_t { type1 = 1, type2 = 2 };

/// Result of classifying a point: one of the types or uninfected.
enum class PointClass : std::uint8_t { uninfected = 0, type1 = 1, type2 = 2 };

inline PointClass to_class(InfectionType t) {
    return t == InfectionType::type1 ? PointClass::type1 : PointClass::type2;
}

/// One growth event. `seq` is the 1-based outburst index; effectiveness is
/// evaluated against the shapes strictly preceding the outburst and cached
/// on first access (the history is append-only, so the answer never
/// changes).
struct Outburst {
    double time = 0.0;
    Point center;
    double radius = 0.0;
    InfectionType itype = InfectionType::type1;
    std::int64_t seq = 0;
};

class ExplosionGuardError : public std::runtime_error {
public:
    explicit ExplosionGuardError(const std::string& what) : std::runtime_error(what) {}
};

/// Chronological shape log with first-cover classification. The infected
/// region is exactly the union of the logged shapes; a point's type is the
/// type of the chronologically first shape containing it, because later
/// outbursts never re-infect. Queries run against a uniform grid over the
/// shapes, which is performance-only: classification is an exact function
/// of the record.
class InfectionHistory {
public:
    InfectionHistory(std::size_t d, std::vector<Ball> initial_1, std::vector<Ball> initial_2,
                     StripeConstraint stripe, double gamma, double covering_resolution,
                     double cell_side = 0.0);

    std::size_t dim() const { return d_; }
    const std::vector<Ball>& initial_1() const { return initial_1_; }
    const std::vector<Ball>& initial_2() const { return initial_2_; }
    const StripeConstraint& stripe() const { return stripe_; }
    double gamma() const { return gamma_; }
    double covering_resolution() const { return covering_resolution_; }
    bool one_type() const { return initial_2_.empty(); }

    std::size_t outburst_count() const { return outbursts_.size(); }
    const Outburst& outburst(std::size_t i) const { return outbursts_[i]; }
    const std::vector<Outburst>& outbursts() const { return outbursts_; }
    double last_time() const { return last_time_; }

    const Outburst& add_outburst(double time, Point center, double radius, InfectionType itype);

    /// Type of x at time t under the first-covering-shape rule; points
    /// outside an active stripe are immune.
    PointClass classify(std::span<const double> x, double t) const;
    /// classify at the latest event time (hot path of the engines).
    PointClass classify_now(std::span<const double> x) const;

    /// Whether outburst i gained previously uninfected territory, decided on
    /// the epsilon-net of its ball (one-sided error below the resolution).
    bool effective(std::size_t i) const;

private:
    friend class Engine;
    bool covered_before(std::span<const double> p, std::int32_t shape_id) const;

    struct ShapeRec {
        Point center;
        double radius;
        double time;
        PointClass cls;
    };

    std::size_t d_;
    std::vector<Ball> initial_1_, initial_2_;
    StripeConstraint stripe_;
    double gamma_;
    double covering_resolution_;
    double last_time_ = 0.0;

    std::vector<ShapeRec> shapes_;  // initials first, then outbursts, chronological
    std::vector<Outburst> outbursts_;
    mutable std::vector<std::int8_t> effective_cache_;  // -1 unknown / 0 / 1

    GridGeometry geom_;
    std::unordered_map<std::uint64_t, std::vector<std::int32_t>> index_;

    void index_shape(std::int32_t id);
};

enum class GrowthMode { one_type, two_type };

struct ProcessConfig {
    explicit ProcessConfig(RadiusDistribution f) : F(std::move(f)) {}

    std::size_t d = 2;
    GrowthMode mode = GrowthMode::two_type;
    double lambda1 = 1.0;
    double lambda2 = 1.0;  // ignored in one_type mode
    RadiusDistribution F;
    double horizon_time = 1.0;
    long max_events = 1000000;
    std::uint64_t seed = 1;
    std::uint64_t stream_salt = 0;  // replica index; selects the substream family
    StripeConstraint stripe;
    double covering_resolution = 0.0;  // 0 -> gamma / 50
    std::vector<Ball> initial_1, initial_2;  // empty -> model defaults
    bool allow_inadmissible = false;
    long max_rejections = kDefaultMaxRejections;
    double cell_side = 0.0;  // 0 -> gamma

    double resolution() const { return covering_resolution > 0.0 ? covering_resolution : F.mean_gamma() / 50.0; }
    double cell() const { return cell_side > 0.0 ? cell_side : F.mean_gamma(); }
};

/// Throws std::invalid_argument describing every constraint violation.
void validate(const ProcessConfig& cfg);

/// Default initial sets: one-type B(0,gamma); two-type B(-2*gamma*e1, gamma)
/// and B(0, gamma).
std::vector<Ball> default_initial_1(const ProcessConfig& cfg);
std::vector<Ball> default_initial_2(const ProcessConfig& cfg);

/// Event-driven growth engine. Candidate events per type are generated by
/// thinning a Poisson process on a cell-union superset of the type's
/// region; the two types run competing clocks and the loser's candidate is
/// discarded and redrawn after each event (exact by memorylessness).
class Engine {
public:
    explicit Engine(ProcessConfig cfg);

    const ProcessConfig& config() const { return cfg_; }
    InfectionHistory& history() { return history_; }
    const InfectionHistory& history() const { return history_; }
    double clock() const { return clock_; }

    /// Next outburst, unbounded in time. Throws ExplosionGuardError when the
    /// event cap is reached.
    const Outburst& step();

    /// Next outburst if it occurs at or before `horizon`; otherwise advances
    /// the scan clock to the horizon and returns nullopt.
    std::optional<std::int64_t> step_until(double horizon);

    /// Run until the next event would pass cfg.horizon_time (or the given
    /// override) or until max_events. Returns false when the event cap
    /// truncated the run before the horizon.
    bool run_until();
    bool run_until(double horizon);

private:
    struct Chain {
        double rate = 0.0;
        PointClass want = PointClass::uninfected;  // uninfected == "any infected"
        CellRegion region;
        RandomStream stream;
        Chain(double r, PointClass w, std::size_t d, double cell, RandomStream s)
            : rate(r), want(w), region(d, cell), stream(std::move(s)) {}
    };

    std::optional<SpaceTimePoint> next_candidate(Chain& chain, double cap);
    void register_ball(const Ball& b, InfectionType t);

    ProcessConfig cfg_;
    InfectionHistory history_;
    std::vector<Chain> chains_;  // [0] -> type1 / single, [1] -> type2
    double clock_ = 0.0;
    Point scratch_;
};

/// Exact sup of |x| over the whole infected set at time t: the union of all
/// shapes, so the max over shapes of |center| + radius.
double norm_sup_all(const InfectionHistory& h, double t);

/// Lower-bound estimate of sup{|x| : x is type-i infected at t}: maximum of
/// |p| over candidate points (outward extreme of every type-i shape plus
/// `boundary_points` quasi-random boundary points per shape) classifying as
/// type i.
double norm_sup_type(const InfectionHistory& h, double t, InfectionType itype,
                     std::size_t boundary_points = 8);

/// Largest s (within the covering resolution) such that B(0,s) is covered by
/// the infected region at time t, by bisection over epsilon-net covering
/// tests; 0 if even the smallest probe ball is not covered.
double norm_star(const InfectionHistory& h, double t);

/// JSONL event log: one header line with the full config echo and seed, then
/// one line per outburst {seq, time, type, center, radius, effective}.
/// Bit-stable across runs with the same seed.
void export_events_jsonl(const InfectionHistory& h, const ProcessConfig& cfg, std::ostream& os);

}  // namespace contgrow

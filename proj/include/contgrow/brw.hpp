#pragma once

#include "contgrow/estimate.hpp"
#include "contgrow/geometry.hpp"
#include "contgrow/radius.hpp"
#include "contgrow/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <queue>
#include <vector>

namespace contgrow {

/// Member of the branching growth population. Each individual owns an
/// independent random stream that drives its birth times and the placement
/// of its children inside its cube.
struct Individual {
    double birth_time = 0.0;
    Point center;
    double half_side = 0.0;
    std::optional<std::size_t> parent;  // none for the ancestor
    RandomStream stream;
};

class BrwCapError : public std::runtime_error {
public:
    explicit BrwCapError(const std::string& what) : std::runtime_error(what) {}
};

/// Population of cubes; no deaths, birth times nondecreasing in index.
class BrwPopulation {
public:
    const std::vector<Individual>& individuals() const { return individuals_; }
    std::size_t size() const { return individuals_.size(); }
    double clock() const { return clock_; }

    /// Append a birth; times must be nondecreasing.
    const Individual& append(Individual ind) {
        if (!individuals_.empty() && ind.birth_time < individuals_.back().birth_time)
            throw std::logic_error("BrwPopulation: birth times must be nondecreasing");
        clock_ = std::max(clock_, ind.birth_time);
        individuals_.push_back(std::move(ind));
        return individuals_.back();
    }
    void advance_clock(double t) { clock_ = std::max(clock_, t); }

private:
    friend class BrwEngine;
    std::vector<Individual> individuals_;
    double clock_ = 0.0;
};

struct BrwConfig {
    explicit BrwConfig(RadiusDistribution f) : F(std::move(f)) {}

    std::size_t d = 1;
    RadiusDistribution F;
    /// false: ancestor half_side = gamma; true: ancestor draws from F.
    bool iid_ancestor = false;
    long population_cap = 1000000;
    std::uint64_t seed = 1;
    /// Salt mixed into every individual's stream id; changing it relabels
    /// the per-individual streams without changing the law.
    std::uint64_t stream_namespace = 0;
};

/// Branching growth engine: every individual gives birth at rate equal to
/// its cube volume (2R)^d, children are uniform in the parent's cube with
/// i.i.d. half sides from F. Individual event schedules persist between
/// births (their rates never change, so persistent exponential schedules
/// and per-event redraws are the same process); a min-heap over next event
/// times gives O(log n) steps.
class BrwEngine {
public:
    explicit BrwEngine(BrwConfig cfg);

    const BrwConfig& config() const { return cfg_; }
    const BrwPopulation& population() const { return pop_; }

    /// Next birth. Throws BrwCapError at the population cap.
    const Individual& step();

    /// Run until the next birth would pass the horizon; false when the
    /// population cap truncated the run early.
    bool run_until(double horizon);

private:
    double cube_rate(double half_side) const;
    RandomStream individual_stream(std::size_t index) const;

    BrwConfig cfg_;
    BrwPopulation pop_;
    RandomStream base_;
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> queue_;
};

/// Rightmost covered extent on an axis over individuals born by t:
/// max(center[axis] + half_side). By symmetry the leftmost extent is the
/// corresponding min.
double rightmost(const BrwPopulation& pop, double t, std::size_t axis);
double leftmost(const BrwPopulation& pop, double t, std::size_t axis);

/// Laplace transform of the projected reproduction intensity,
///   m(phi, phihat) = (phi * phihat)^-1 Int (2r)^(d-1) (1 - e^(-2 phi r)) dF(r),
/// closed form for deterministic F, adaptive quadrature otherwise.
/// nullopt when the r-integral diverges (heavy tail against e^{|phi|r}, or
/// a missing (d-1)-moment for pareto).
std::optional<double> laplace_m(double phi, double phihat, const RadiusDistribution& F,
                                std::size_t d);

/// alpha(phi) = inf{phihat : m(phi, phihat) <= 1}, i.e. the unique root of
/// m(phi, .) = 1, by bisection to 1e-9; +infinity when the r-integral
/// diverges.
double alpha(double phi, const RadiusDistribution& F, std::size_t d);

/// Mean and CI of rightmost(T)/T on the first axis across replicas.
/// Diagnostics: "half_horizon" (the same estimate at T/2) and
/// "capped_replicas" (runs truncated by the population cap; their partial
/// values are included).
EstimateResult estimate_zeta(const RadiusDistribution& F, std::size_t d, double horizon,
                             long replicas, std::uint64_t seed, int parallelism = 1,
                             long population_cap = 1000000, bool iid_ancestor = false);

/// JSONL export: header with config echo, then one line per individual
/// {seq, time, center, half_side, parent}.
void export_population_jsonl(const BrwPopulation& pop, const BrwConfig& cfg, std::ostream& os);

}  // namespace contgrow

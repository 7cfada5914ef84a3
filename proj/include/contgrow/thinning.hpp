#pragma once

#include "contgrow/geometry.hpp"
#include "contgrow/radius.hpp"
#include "contgrow/union_sampling.hpp"

#include <functional>
#include <span>
#include <stdexcept>

namespace contgrow {

/// Marked point of a space-time Poisson process: location, event time, the
/// attached radius draw and the attached uniform mark.
struct SpaceTimePoint {
    Point location;
    double time = 0.0;
    double radius = 0.0;
    double uniform_mark = 0.0;
};

/// Thrown when a thinning loop rejects max_rejections times in a row, which
/// signals a target region of measure ~0 relative to its proposals.
class RejectionGuardError : public std::runtime_error {
public:
    explicit RejectionGuardError(const std::string& what) : std::runtime_error(what) {}
};

inline constexpr long kDefaultMaxRejections = 1000000000L;

/// First point after `clock` of a rate-`rate` space-time Poisson process
/// restricted to {region_test == true}, generated by thinning a proposal
/// process on the ball union. Each proposal trial advances the clock by an
/// Exponential(rate * sum-of-ball-volumes) increment; the union sampler's
/// multiplicity rejections and the region rejections both consume clock
/// time, which makes the accepted stream exactly Poisson with the given
/// rate on the region. Radii and uniform marks are attached to every
/// proposal that survives the multiplicity correction, i.e. to every point
/// of the realized process on the proposal union.
SpaceTimePoint next_thinned_event(const std::function<bool(std::span<const double>)>& region_test,
                                  std::span<const Ball> proposal_balls, double rate, double clock,
                                  const RadiusDistribution& F, RandomStream& rng,
                                  long max_rejections = kDefaultMaxRejections);

}  // namespace contgrow

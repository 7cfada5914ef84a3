#pragma once

#include "contgrow/estimate.hpp"
#include "contgrow/geometry.hpp"
#include "contgrow/random.hpp"

#include <span>

namespace contgrow {

/// Monte Carlo estimate of the Lebesgue volume of a union of balls: uniform
/// samples in the bounding box, hit counting. Unbiased; the standard error
/// is reported in diagnostics["se"].
EstimateResult union_volume(std::span<const Ball> balls, long sample_count, RandomStream& rng);

/// Exact uniform sample on a union of balls: pick a ball with probability
/// proportional to its volume, sample uniformly inside it, accept with
/// probability 1 / multiplicity. Terminates with probability 1.
Point sample_uniform_in_union(std::span<const Ball> balls, RandomStream& rng);

/// Uniform point in one ball (rejection from the bounding cube for d <= 3,
/// normalized Gaussian direction with radial inversion above).
Point sample_in_ball(const Ball& b, RandomStream& rng);

/// Sum of individual ball volumes (the sum-with-multiplicity proposal mass).
double total_ball_volume(std::span<const Ball> balls);

namespace detail {
/// One proposal trial of the union sampler: samples a candidate and reports
/// whether the multiplicity correction accepts it. Exposed so that the
/// thinning generator can charge clock time to every trial.
bool propose_in_union(std::span<const Ball> balls, double total_volume, RandomStream& rng,
                      Point& candidate);
}  // namespace detail

}  // namespace contgrow

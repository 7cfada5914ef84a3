#include "contgrow/thinning.hpp"

namespace contgrow {

SpaceTimePoint next_thinned_event(const std::function<bool(std::span<const double>)>& region_test,
                                  std::span<const Ball> proposal_balls, double rate, double clock,
                                  const RadiusDistribution& F, RandomStream& rng,
                                  long max_rejections) {
    if (proposal_balls.empty()) throw std::invalid_argument("next_thinned_event: empty proposals");
    if (!(rate > 0.0)) throw std::invalid_argument("next_thinned_event: rate must be > 0");
    if (!(clock >= 0.0)) throw std::invalid_argument("next_thinned_event: clock must be >= 0");

    const double total = total_ball_volume(proposal_balls);
    double t = clock;
    Point candidate;
    for (long rejections = 0; rejections < max_rejections; ++rejections) {
        t += rng.exponential(rate * total);
        if (!detail::propose_in_union(proposal_balls, total, rng, candidate)) continue;
        const double radius = F.sample(rng);
        const double mark = rng.uniform01();
        if (!region_test(candidate)) continue;
        return SpaceTimePoint{std::move(candidate), t, radius, mark};
    }
    throw RejectionGuardError("next_thinned_event: rejection guard tripped; region has measure ~0 "
                              "relative to proposals");
}

}  // namespace contgrow

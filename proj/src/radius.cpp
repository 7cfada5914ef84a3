#include "contgrow/radius.hpp"

#include <cmath>
#include <limits>

namespace contgrow {

RadiusDistribution RadiusDistribution::deterministic(double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("deterministic radius must be positive and finite");
    return RadiusDistribution(RadiusFamily::deterministic, r, 0.0, r, true);
}

RadiusDistribution RadiusDistribution::uniform(double a, double b) {
    if (!(a > 0.0) || !(a < b) || !std::isfinite(b))
        throw std::invalid_argument("uniform radius requires 0 < a < b < inf");
    return RadiusDistribution(RadiusFamily::uniform, a, b, 0.5 * (a + b), true);
}

RadiusDistribution RadiusDistribution::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate))
        throw std::invalid_argument("exponential radius rate must be positive and finite");
    return RadiusDistribution(RadiusFamily::exponential, rate, 0.0, 1.0 / rate, true);
}

RadiusDistribution RadiusDistribution::pareto(double scale, double shape) {
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("pareto scale must be positive and finite");
    if (!(shape > 1.0) || !std::isfinite(shape))
        throw std::invalid_argument("pareto shape must be > 1 (finite mean)");
    return RadiusDistribution(RadiusFamily::pareto, scale, shape,
                              scale * shape / (shape - 1.0), false);
}

std::string RadiusDistribution::family_name() const {
    switch (family_) {
        case RadiusFamily::deterministic: return "deterministic";
        case RadiusFamily::uniform: return "uniform";
        case RadiusFamily::exponential: return "exponential";
        case RadiusFamily::pareto: return "pareto";
    }
    return "?";
}

double RadiusDistribution::sample(RandomStream& rng) const {
    switch (family_) {
        case RadiusFamily::deterministic:
            return p1_;
        case RadiusFamily::uniform:
            return rng.uniform(p1_, p2_);
        case RadiusFamily::exponential:
            return rng.exponential(p1_);
        case RadiusFamily::pareto:
            return p1_ * std::pow(1.0 - rng.uniform01(), -1.0 / p2_);
    }
    throw std::logic_error("unreachable");
}

double RadiusDistribution::support_upper() const {
    switch (family_) {
        case RadiusFamily::deterministic: return p1_;
        case RadiusFamily::uniform: return p2_;
        default: return std::numeric_limits<double>::infinity();
    }
}

}  // namespace contgrow

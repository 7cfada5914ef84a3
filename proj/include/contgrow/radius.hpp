#pragma once

#include "contgrow/random.hpp"

#include <stdexcept>
#include <string>

namespace contgrow {

enum class RadiusFamily { deterministic, uniform, exponential, pareto };

/// Outburst radius law F together with its admissibility metadata. The
/// moment condition requires a finite exponential moment on the right tail;
/// it holds for the bounded-support and exponential families and fails for
/// pareto, which is therefore gated behind an explicit override downstream.
class RadiusDistribution {
public:
    static RadiusDistribution deterministic(double r);
    static RadiusDistribution uniform(double a, double b);
    static RadiusDistribution exponential(double rate);
    /// Requires shape > 1 so that the mean is finite.
    static RadiusDistribution pareto(double scale, double shape);

    RadiusFamily family() const { return family_; }
    double mean_gamma() const { return mean_gamma_; }
    bool mgf_exists() const { return mgf_exists_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }
    std::string family_name() const;

    /// One draw from F, strictly positive.
    double sample(RandomStream& rng) const;

    /// An upper bound of the support, infinity when unbounded.
    double support_upper() const;

private:
    RadiusDistribution(RadiusFamily f, double p1, double p2, double mean, bool mgf)
        : family_(f), p1_(p1), p2_(p2), mean_gamma_(mean), mgf_exists_(mgf) {}

    RadiusFamily family_;
    double p1_ = 0.0;
    double p2_ = 0.0;
    double mean_gamma_ = 0.0;
    bool mgf_exists_ = false;
};

/// Truth of the exponential moment condition for the family.
inline bool mgf_admissible(const RadiusDistribution& f) { return f.mgf_exists(); }

}  // namespace contgrow

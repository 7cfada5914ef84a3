#include "contgrow/union_sampling.hpp"

#include <algorithm>
#include <limits>

namespace contgrow {

double total_ball_volume(std::span<const Ball> balls) {
    double s = 0.0;
    for (const Ball& b : balls) s += ball_volume(b.center.size(), b.radius);
    return s;
}

Point sample_in_ball(const Ball& b, RandomStream& rng) {
    const std::size_t d = b.center.size();
    Point p(d);
    if (d <= 3) {
        for (;;) {
            double s = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                const double u = rng.uniform(-1.0, 1.0);
                p[i] = u;
                s += u * u;
            }
            if (s <= 1.0) break;
        }
    } else {
        double n;
        do {
            for (auto& c : p) c = rng.normal01();
            n = norm(p);
        } while (n < 1e-300);
        const double radial = std::pow(rng.uniform01(), 1.0 / static_cast<double>(d));
        for (auto& c : p) c *= radial / n;
    }
    for (std::size_t i = 0; i < d; ++i) p[i] = b.center[i] + b.radius * p[i];
    return p;
}

namespace detail {

bool propose_in_union(std::span<const Ball> balls, double total_volume, RandomStream& rng,
                      Point& candidate) {
    // Pick a ball proportionally to its volume.
    double u = rng.uniform01() * total_volume;
    std::size_t pick = balls.size() - 1;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        u -= ball_volume(balls[i].center.size(), balls[i].radius);
        if (u <= 0.0) { pick = i; break; }
    }
    candidate = sample_in_ball(balls[pick], rng);
    std::size_t multiplicity = 0;
    for (const Ball& b : balls)
        if (contains(b, candidate)) ++multiplicity;
    // The candidate lies in the closed picked ball, so multiplicity >= 1.
    return multiplicity == 1 || rng.uniform01() * static_cast<double>(multiplicity) < 1.0;
}

}  // namespace detail

Point sample_uniform_in_union(std::span<const Ball> balls, RandomStream& rng) {
    if (balls.empty()) throw std::invalid_argument("sample_uniform_in_union: empty ball list");
    const double total = total_ball_volume(balls);
    Point p;
    while (!detail::propose_in_union(balls, total, rng, p)) {}
    return p;
}

EstimateResult union_volume(std::span<const Ball> balls, long sample_count, RandomStream& rng) {
    if (balls.empty()) throw std::invalid_argument("union_volume: empty ball list");
    if (sample_count < 1) throw std::invalid_argument("union_volume: sample_count must be >= 1");
    const std::size_t d = balls.front().center.size();
    Point lo(d, std::numeric_limits<double>::infinity());
    Point hi(d, -std::numeric_limits<double>::infinity());
    for (const Ball& b : balls) {
        validate_ball(b, d);
        for (std::size_t i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], b.center[i] - b.radius);
            hi[i] = std::max(hi[i], b.center[i] + b.radius);
        }
    }
    double box = 1.0;
    for (std::size_t i = 0; i < d; ++i) box *= hi[i] - lo[i];

    long hits = 0;
    Point p(d);
    for (long k = 0; k < sample_count; ++k) {
        for (std::size_t i = 0; i < d; ++i) p[i] = rng.uniform(lo[i], hi[i]);
        for (const Ball& b : balls)
            if (contains(b, p)) { ++hits; break; }
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(sample_count);
    const double se = box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(sample_count));
    EstimateResult r;
    r.point = box * frac;
    r.ci_low = r.point - 1.959963984540054 * se;
    r.ci_high = r.point + 1.959963984540054 * se;
    r.replicas = sample_count;
    r.diagnostics["se"] = se;
    return r;
}

}  // namespace contgrow

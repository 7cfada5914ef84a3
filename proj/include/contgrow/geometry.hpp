#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace contgrow {

/// Point in R^d; the dimension is the vector length.
using Point = std::vector<double>;

/// Closed Euclidean ball.
struct Ball {
    Point center;
    double radius = 0.0;
};

/// Closed axis-aligned cube given by center and half side length.
struct Cube {
    Point center;
    double half_side = 0.0;
};

/// Growth restriction to the stripe {x : |x_i| <= b for all i >= 2}.
/// Coordinate 1 (index 0) is unconstrained.
struct StripeConstraint {
    double b = 0.0;
    bool active = false;
};

void validate_point(const Point& x, std::size_t d);
void validate_ball(const Ball& b, std::size_t d);
void validate_cube(const Cube& c, std::size_t d);

double sq_distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> x);

bool contains(const Ball& b, std::span<const double> x);
bool contains(const Cube& c, std::span<const double> x);

bool in_stripe(std::span<const double> x, const StripeConstraint& c);

/// Volume of a d-ball of radius r.
double ball_volume(std::size_t d, double r);

/// Visit the deterministic epsilon-net of a ball: the cubic grid anchored at
/// the center with spacing <= resolution, intersected with the closed ball,
/// plus the center and the 2d axis-extreme boundary points. The callback may
/// return false to stop early; the function then returns false.
bool for_each_net_point(const Ball& target, double resolution,
                        const std::function<bool(std::span<const double>)>& visit);

/// One-sided approximate covering test: true iff every net point of the
/// target lies in some cover ball. May report covered when an uncovered
/// sliver of diameter < resolution exists; never reports uncovered for a
/// fully covered target.
bool is_ball_covered(const Ball& target, std::span<const Ball> covers, double resolution);

/// `count` approximately uniformly spread unit directions in R^d
/// (d=1: signs; d=2: equal angles; d>=3: Fibonacci-style spiral on S^2,
/// hash-scrambled low-discrepancy directions above that).
std::vector<Point> spread_directions(std::size_t d, std::size_t count);

}  // namespace contgrow

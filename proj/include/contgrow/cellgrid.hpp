#pragma once

#include "contgrow/geometry.hpp"
#include "contgrow/random.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace contgrow {

/// Uniform grid over R^d with side `cell`. Cell coordinates are packed into
/// a single 64-bit key (64/d bits per signed coordinate), which is exact
/// within the desk-scale coordinate range and keeps hashing allocation-free.
class GridGeometry {
public:
    GridGeometry(std::size_t d, double cell);

    std::size_t dim() const { return d_; }
    double cell_side() const { return cell_; }
    double cell_volume() const { return cell_volume_; }

    long coord(double x) const;
    std::uint64_t pack(std::span<const long> coords) const;
    void unpack(std::uint64_t key, std::span<long> coords) const;
    std::uint64_t key_of(std::span<const double> x) const;

    /// Smallest distance from x to the closed cell box (0 when inside).
    double sq_distance_to_cell(std::uint64_t key, std::span<const double> x) const;

    /// Visit keys of all cells intersecting the closed cube.
    template <typename Fn>
    void for_each_cell_of_cube(const Cube& c, Fn&& fn) const {
        std::vector<long> lo(d_), hi(d_), idx(d_);
        for (std::size_t i = 0; i < d_; ++i) {
            lo[i] = coord(c.center[i] - c.half_side);
            hi[i] = coord(c.center[i] + c.half_side);
            idx[i] = lo[i];
        }
        for (;;) {
            fn(pack(idx));
            std::size_t k = 0;
            for (; k < d_; ++k) {
                if (++idx[k] <= hi[k]) break;
                idx[k] = lo[k];
            }
            if (k == d_) break;
        }
    }

    /// Visit keys of all cells intersecting the closed ball.
    template <typename Fn>
    void for_each_cell_of_ball(const Ball& b, Fn&& fn) const {
        std::vector<long> lo(d_), hi(d_), idx(d_);
        for (std::size_t i = 0; i < d_; ++i) {
            lo[i] = coord(b.center[i] - b.radius);
            hi[i] = coord(b.center[i] + b.radius);
            idx[i] = lo[i];
        }
        const double r2 = b.radius * b.radius;
        for (;;) {
            // closest point of the cell box to the ball center
            double s = 0.0;
            for (std::size_t i = 0; i < d_; ++i) {
                const double clo = static_cast<double>(idx[i]) * cell_;
                const double chi = clo + cell_;
                const double c = b.center[i];
                if (c < clo) s += (clo - c) * (clo - c);
                else if (c > chi) s += (c - chi) * (c - chi);
            }
            if (s <= r2) fn(pack(idx));
            std::size_t k = 0;
            for (; k < d_; ++k) {
                if (++idx[k] <= hi[k]) break;
                idx[k] = lo[k];
            }
            if (k == d_) break;
        }
    }

private:
    std::size_t d_;
    double cell_;
    double cell_volume_;
    unsigned bits_;
    std::uint64_t mask_;
    long range_;
};

/// Dynamic union of grid cells with O(1) uniform sampling and exact volume.
/// Serves as the proposal region for thinning: a superset of the region of
/// interest made of disjoint boxes, so no multiplicity correction is needed.
class CellRegion {
public:
    CellRegion(std::size_t d, double cell) : geom_(d, cell) {}

    void add_ball(const Ball& b);
    double volume() const { return static_cast<double>(keys_.size()) * geom_.cell_volume(); }
    bool empty() const { return keys_.empty(); }
    std::size_t cell_count() const { return keys_.size(); }

    /// Uniform point in the cell union; writes into `out` (resized to d).
    void sample(RandomStream& rng, Point& out) const;

private:
    GridGeometry geom_;
    std::vector<std::uint64_t> keys_;
    std::unordered_set<std::uint64_t> seen_;
};

}  // namespace contgrow

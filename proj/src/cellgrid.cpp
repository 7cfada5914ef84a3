#include "contgrow/cellgrid.hpp"

#include <array>
#include <cmath>

namespace contgrow {

GridGeometry::GridGeometry(std::size_t d, double cell) : d_(d), cell_(cell) {
    if (d < 1) throw std::invalid_argument("GridGeometry: dimension must be >= 1");
    if (!(cell > 0.0)) throw std::invalid_argument("GridGeometry: cell side must be > 0");
    if (d > 16) throw std::invalid_argument("GridGeometry: dimension too large for cell packing");
    cell_volume_ = std::pow(cell, static_cast<double>(d));
    bits_ = static_cast<unsigned>(64 / d);
    if (bits_ > 21) bits_ = 21;  // +-2^20 cells per axis is ample at desk scale
    mask_ = (1ULL << bits_) - 1ULL;
    range_ = static_cast<long>(1ULL << (bits_ - 1));
}

long GridGeometry::coord(double x) const {
    const long c = static_cast<long>(std::floor(x / cell_));
    if (c <= -range_ || c >= range_ - 1)
        throw std::runtime_error("GridGeometry: coordinate outside packable range");
    return c;
}

std::uint64_t GridGeometry::pack(std::span<const long> coords) const {
    std::uint64_t key = 0;
    for (std::size_t i = 0; i < d_; ++i) {
        const std::uint64_t biased = static_cast<std::uint64_t>(coords[i] + range_) & mask_;
        key = (key << bits_) | biased;
    }
    return key;
}

void GridGeometry::unpack(std::uint64_t key, std::span<long> coords) const {
    for (std::size_t i = d_; i-- > 0;) {
        coords[i] = static_cast<long>(key & mask_) - range_;
        key >>= bits_;
    }
}

std::uint64_t GridGeometry::key_of(std::span<const double> x) const {
    std::array<long, 32> c{};
    for (std::size_t i = 0; i < d_; ++i) c[i] = coord(x[i]);
    return pack(std::span<const long>(c.data(), d_));
}

double GridGeometry::sq_distance_to_cell(std::uint64_t key, std::span<const double> x) const {
    std::array<long, 32> c{};
    unpack(key, std::span<long>(c.data(), d_));
    double s = 0.0;
    for (std::size_t i = 0; i < d_; ++i) {
        const double lo = static_cast<double>(c[i]) * cell_;
        const double hi = lo + cell_;
        if (x[i] < lo) s += (lo - x[i]) * (lo - x[i]);
        else if (x[i] > hi) s += (x[i] - hi) * (x[i] - hi);
    }
    return s;
}

void CellRegion::add_ball(const Ball& b) {
    geom_.for_each_cell_of_ball(b, [&](std::uint64_t key) {
        if (seen_.insert(key).second) keys_.push_back(key);
    });
}

void CellRegion::sample(RandomStream& rng, Point& out) const {
    if (keys_.empty()) throw std::logic_error("CellRegion::sample: empty region");
    const std::uint64_t key = keys_[rng.uniform_index(keys_.size())];
    std::array<long, 32> c{};
    geom_.unpack(key, std::span<long>(c.data(), geom_.dim()));
    out.resize(geom_.dim());
    for (std::size_t i = 0; i < geom_.dim(); ++i) {
        const double lo = static_cast<double>(c[i]) * geom_.cell_side();
        out[i] = lo + geom_.cell_side() * rng.uniform01();
    }
}

}  // namespace contgrow

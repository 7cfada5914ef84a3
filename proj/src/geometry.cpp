#include "contgrow/geometry.hpp"

#include "contgrow/random.hpp"

#include <algorithm>

namespace contgrow {

void validate_point(const Point& x, std::size_t d) {
    if (d < 1) throw std::invalid_argument("dimension must be >= 1");
    if (x.size() != d) throw std::invalid_argument("point dimension mismatch");
    for (double c : x)
        if (!std::isfinite(c)) throw std::invalid_argument("point coordinate not finite");
}

void validate_ball(const Ball& b, std::size_t d) {
    validate_point(b.center, d);
    if (!(b.radius > 0.0) || !std::isfinite(b.radius))
        throw std::invalid_argument("ball radius must be positive and finite");
}

void validate_cube(const Cube& c, std::size_t d) {
    validate_point(c.center, d);
    if (!(c.half_side > 0.0) || !std::isfinite(c.half_side))
        throw std::invalid_argument("cube half_side must be positive and finite");
}

double sq_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

double norm(std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return std::sqrt(s);
}

bool contains(const Ball& b, std::span<const double> x) {
    if (x.size() != b.center.size()) throw std::invalid_argument("dimension mismatch");
    return sq_distance(b.center, x) <= b.radius * b.radius;
}

bool contains(const Cube& c, std::span<const double> x) {
    if (x.size() != c.center.size()) throw std::invalid_argument("dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - c.center[i]) > c.half_side) return false;
    return true;
}

bool in_stripe(std::span<const double> x, const StripeConstraint& c) {
    if (!c.active) return true;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i]) > c.b) return false;
    return true;
}

double ball_volume(std::size_t d, double r) {
    const double dd = static_cast<double>(d);
    return std::pow(3.14159265358979323846, dd / 2.0) / std::tgamma(dd / 2.0 + 1.0) *
           std::pow(r, dd);
}

bool for_each_net_point(const Ball& target, double resolution,
                        const std::function<bool(std::span<const double>)>& visit) {
    if (!(resolution > 0.0)) throw std::invalid_argument("resolution must be > 0");
    const std::size_t d = target.center.size();
    const double r = target.radius;
    Point p(d);

    if (!visit(target.center)) return false;
    for (std::size_t k = 0; k < d; ++k) {
        p = target.center;
        p[k] += r;
        if (!visit(p)) return false;
        p[k] -= 2.0 * r;
        if (!visit(p)) return false;
    }

    const long m = static_cast<long>(std::floor(r / resolution));
    if (m == 0) return true;
    const double r2 = r * r;
    std::vector<long> idx(d, -m);
    for (;;) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double off = static_cast<double>(idx[k]) * resolution;
            p[k] = target.center[k] + off;
            s += off * off;
        }
        bool all_zero = true;
        for (std::size_t k = 0; k < d; ++k)
            if (idx[k] != 0) { all_zero = false; break; }
        if (!all_zero && s <= r2) {
            if (!visit(p)) return false;
        }
        std::size_t k = 0;
        for (; k < d; ++k) {
            if (++idx[k] <= m) break;
            idx[k] = -m;
        }
        if (k == d) break;
    }
    return true;
}

bool is_ball_covered(const Ball& target, std::span<const Ball> covers, double resolution) {
    return for_each_net_point(target, resolution, [&](std::span<const double> p) {
        for (const Ball& c : covers)
            if (contains(c, p)) return true;
        return false;
    });
}

std::vector<Point> spread_directions(std::size_t d, std::size_t count) {
    if (d < 1 || count < 1) throw std::invalid_argument("spread_directions: bad arguments");
    std::vector<Point> out;
    out.reserve(count);
    if (d == 1) {
        for (std::size_t i = 0; i < count; ++i) out.push_back({i % 2 == 0 ? 1.0 : -1.0});
        return out;
    }
    if (d == 2) {
        for (std::size_t i = 0; i < count; ++i) {
            const double a = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(count);
            out.push_back({std::cos(a), std::sin(a)});
        }
        return out;
    }
    if (d == 3) {
        // Fibonacci sphere
        const double ga = 2.399963229728653;
        for (std::size_t i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = ga * static_cast<double>(i);
            out.push_back({rho * std::cos(a), rho * std::sin(a), z});
        }
        return out;
    }
    // d >= 4: deterministic Gaussian directions from a fixed stream
    RandomStream rs(0x5d1ec7ab, 0xd1);
    for (std::size_t i = 0; i < count; ++i) {
        Point v(d);
        double n;
        do {
            for (auto& c : v) c = rs.normal01();
            n = norm(v);
        } while (n < 1e-12);
        for (auto& c : v) c /= n;
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace contgrow

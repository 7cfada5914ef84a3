#pragma once

// Shared test utilities: statistical tests, analytic oracles and an
// independent reference simulator. Everything here is test-only and kept
// independent of the library's sampling internals wherever it serves as an
// oracle.

#include "contgrow/geometry.hpp"
#include "contgrow/radius.hpp"
#include "contgrow/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace testsup {

// ---------------------------------------------------------------------------
// Statistics

/// Asymptotic Kolmogorov-Smirnov p-value for a sample against a continuous
/// CDF.
inline double ks_p_value(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    }
    const double lambda = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        p += sign * 2.0 * std::exp(-2.0 * k * k * lambda * lambda);
        sign = -sign;
    }
    return std::clamp(p, 0.0, 1.0);
}

/// Upper regularized incomplete gamma Q(a, x) via series / continued
/// fraction (for chi-square p-values).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 0.0;
    if (x == 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    double b = x + 1.0 - a, c = 1e300, dd = 1.0 / b, h = dd;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        dd = an * dd + b;
        if (std::abs(dd) < 1e-300) dd = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        dd = 1.0 / dd;
        const double del = dd * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

/// Chi-square p-value from observed counts against expected counts.
inline double chi_square_p(const std::vector<double>& observed,
                           const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i)
        stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
    return gamma_q(0.5 * static_cast<double>(observed.size() - 1), 0.5 * stat);
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    var /= n - 1.0;
    return {m, std::sqrt(var / n)};
}

/// |mean difference| in units of the pooled standard error.
inline double z_distance(const MeanSe& a, const MeanSe& b) {
    return std::abs(a.mean - b.mean) / std::sqrt(a.se * a.se + b.se * b.se);
}

// ---------------------------------------------------------------------------
// Analytic oracles

/// Area of the intersection of two unit-radius disks with centers at
/// distance dist < 2.
inline double unit_disk_lens_area(double dist) {
    return 2.0 * std::acos(dist / 2.0) - 0.5 * dist * std::sqrt(4.0 - dist * dist);
}

// ---------------------------------------------------------------------------
// Independent reference simulator (oracle for the one-type engine)
//
// Bounding-box thinning: candidates come from a homogeneous Poisson process
// on an axis-aligned box that always contains the infected union, and are
// accepted by a direct linear-scan membership test. No cell regions, no
// multiplicity bookkeeping; an intentionally different route to the same
// law.

struct NaiveRun {
    long events = 0;
    double norm_sup = 0.0;
};

inline NaiveRun naive_one_type_run(std::size_t d, double lambda,
                                   const contgrow::RadiusDistribution& F, double horizon,
                                   contgrow::RandomStream rng) {
    using contgrow::Ball;
    std::vector<Ball> balls{Ball{contgrow::Point(d, 0.0), F.mean_gamma()}};
    double reach = F.mean_gamma();  // sup-norm bound of the union
    double t = 0.0;
    NaiveRun out;
    out.norm_sup = F.mean_gamma();
    contgrow::Point p(d);
    for (;;) {
        const double side = 2.0 * reach;
        double boxvol = 1.0;
        for (std::size_t i = 0; i < d; ++i) boxvol *= side;
        t += rng.exponential(lambda * boxvol);
        if (t > horizon) break;
        for (std::size_t i = 0; i < d; ++i) p[i] = rng.uniform(-reach, reach);
        bool inside = false;
        for (const Ball& b : balls)
            if (contgrow::contains(b, p)) { inside = true; break; }
        if (!inside) continue;
        const double r = F.sample(rng);
        balls.push_back(Ball{p, r});
        ++out.events;
        out.norm_sup = std::max(out.norm_sup, contgrow::norm(p) + r);
        double ext = r;
        for (std::size_t i = 0; i < d; ++i) ext = std::max(ext, std::abs(p[i]) + r);
        reach = std::max(reach, ext);
    }
    return out;
}

}  // namespace testsup

#pragma once

#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <string>

namespace contgrow {

/// Point estimate with a 95% normal confidence interval and free-form
/// diagnostics (half-scale estimates, censoring rates, cap flags, ...).
struct EstimateResult {
    double point = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    long replicas = 0;
    std::map<std::string, double> diagnostics;

    double standard_error() const { return (ci_high - ci_low) / (2.0 * 1.959963984540054); }
    double ci_width() const { return ci_high - ci_low; }
};

/// Mean / 95% CI over replica values.
inline EstimateResult summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: no values");
    const long n = static_cast<long>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
    const double se = std::sqrt(var / static_cast<double>(n));
    EstimateResult r;
    r.point = mean;
    r.ci_low = mean - 1.959963984540054 * se;
    r.ci_high = mean + 1.959963984540054 * se;
    r.replicas = n;
    return r;
}

/// Binomial proportion with normal 95% CI.
inline EstimateResult summarize_proportion(long successes, long trials) {
    if (trials < 1) throw std::invalid_argument("summarize_proportion: no trials");
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    EstimateResult r;
    r.point = p;
    r.ci_low = p - 1.959963984540054 * se;
    r.ci_high = p + 1.959963984540054 * se;
    r.replicas = trials;
    return r;
}

}  // namespace contgrow
